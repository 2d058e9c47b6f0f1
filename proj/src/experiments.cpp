// secnoma - secure beamforming simulator for MISO-NOMA cognitive radio downlinks with SWIPT
// Copyright (C) 2026 the secnoma authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "secnoma/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

namespace secnoma {

namespace {

double nan_value() { return std::numeric_limits<double>::quiet_NaN(); }

ScenarioConfig scenario_for_point(const ExperimentConfig &cfg, double value) {
  ScenarioConfig sc = cfg.scenario;
  switch (cfg.sweep) {
    case SweepKind::ehr_count:
      sc.topology.secondary_ehrs = static_cast<int>(value);
      break;
    case SweepKind::gamma_p:
      sc.gamma_p = value;
      break;
    case SweepKind::iterations:
      break;
  }
  return sc;
}

}  // namespace

std::uint64_t channel_seed(std::uint64_t master_seed, int point, int trial) {
  return seed_combine(seed_combine(master_seed, 0xc4a2 + static_cast<std::uint64_t>(point)),
                      static_cast<std::uint64_t>(trial));
}

std::uint64_t digest_channels(const ChannelSet &ch) {
  std::uint64_t h = 0x9a3c7e1f2b4d5e6fULL;
  auto fold = [&h](const CVector &v) {
    for (int i = 0; i < v.size(); ++i) {
      std::uint64_t bits;
      double re = v(i).real(), im = v(i).imag();
      std::memcpy(&bits, &re, 8);
      h = splitmix64(h ^ bits);
      std::memcpy(&bits, &im, 8);
      h = splitmix64(h ^ bits);
    }
  };
  for (const auto &vm : ch.h_p)
    for (const auto &v : vm) fold(v);
  for (const auto &vm : ch.f_s)
    for (const auto &v : vm) fold(v);
  for (const auto &v : ch.q_p) fold(v);
  for (const auto &v : ch.h_s) fold(v);
  for (const auto &vm : ch.g_emk)
    for (const auto &v : vm) fold(v);
  for (const auto &vm : ch.f_emk)
    for (const auto &v : vm) fold(v);
  for (const auto &v : ch.q_el) fold(v);
  for (const auto &v : ch.g_el) fold(v);
  return h;
}

RunRecord run_scheme(Scheme scheme, const ChannelSet &ch, const QosRequirements &reqs,
                     const EhCircuitParams &eh, const SolverSettings &settings,
                     std::uint64_t seed, const std::optional<CovarianceSolution> &anchor,
                     CovarianceSolution *relaxed_out) {
  RunRecord rec;
  rec.scheme = to_string(scheme);
  rec.seed = seed;
  rec.channel_digest = digest_channels(ch);
  rec.margin_c1 = rec.margin_c2 = rec.margin_c3 = rec.margin_c4 = rec.margin_c5 = nan_value();
  const auto t0 = std::chrono::steady_clock::now();

  const std::uint64_t sca_seed = seed_combine(seed, static_cast<std::uint64_t>(scheme) + 11);
  ScaResult r;
  switch (scheme) {
    case Scheme::noma_jamming: {
      ScaOptions opts;
      opts.anchor = anchor;
      r = run_sca(ch, reqs, eh, settings, sca_seed, opts);
      break;
    }
    case Scheme::noma_nojam:
      r = solve_no_jamming(ch, reqs, eh, settings, sca_seed);
      break;
    case Scheme::oma_tdma:
      r = solve_oma_tdma(ch, reqs, eh, settings, sca_seed);
      break;
  }
  rec.iterations = r.iterations;
  rec.restarts = r.restarts;
  rec.trace = r.trace;
  rec.message = r.message;
  if (relaxed_out && r.has_solution()) *relaxed_out = r.relaxed;

  if (r.status == ScaResult::Status::infeasible) {
    rec.status = "infeasible";
  } else if (!r.has_solution() || !r.converged) {
    rec.status = "failed";
  } else {
    rec.status = "converged";
    // beam recovery + margin verification in the scheme's own semantics
    const bool oma = scheme == Scheme::oma_tdma;
    const FeasibilityTolerance tight{1e-9, 1e-12};
    FeasibilityFn feasible;
    ObjectiveFn objective;
    if (oma) {
      feasible = [&](const CovarianceSolution &s) {
        return verify_oma_feasibility(ch, s, reqs, eh, tight).all_satisfied();
      };
      objective = [](const CovarianceSolution &s) { return oma_objective(s); };
    } else {
      feasible = [&](const CovarianceSolution &s) {
        return verify_feasibility(ch, s, reqs, eh, tight).all_satisfied();
      };
      objective = [](const CovarianceSolution &s) { return total_power(s); };
    }
    const std::uint64_t rand_seed = seed_combine(sca_seed, 0x5a4dULL);
    const ExtractionOutcome ex = extract_rank_one(r.relaxed, settings.rank_tolerance,
                                                  settings.randomization_trials, rand_seed,
                                                  feasible, objective);
    const CovarianceSolution &final_sol = ex.success ? ex.covariances : r.relaxed;
    rec.extracted = ex.success;
    rec.objective_w = ex.success ? ex.power : r.objective;
    for (double q : ex.rank_ratios) rec.max_rank_ratio = std::max(rec.max_rank_ratio, q);
    const FeasibilityReport rep = oma ? verify_oma_feasibility(ch, final_sol, reqs, eh)
                                      : verify_feasibility(ch, final_sol, reqs, eh);
    rec.margin_c1 = rep.min_margin("C1");
    rec.margin_c2 = rep.min_margin("C2");
    rec.margin_c3 = rep.min_margin("C3");
    rec.margin_c4 = rep.min_margin("C4");
    rec.margin_c5 = rep.min_margin("C5");
  }

  rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                    .count();
  return rec;
}

std::vector<RunRecord> run_sweep(const ExperimentConfig &cfg) {
  cfg.validate();
  const bool iter_mode = cfg.sweep == SweepKind::iterations;
  const std::vector<double> points = iter_mode ? std::vector<double>{0.0} : cfg.sweep_values;
  const int npoints = static_cast<int>(points.size());
  const int nschemes = static_cast<int>(cfg.schemes.size());

  std::vector<RunRecord> records(static_cast<size_t>(npoints) * cfg.trials * nschemes);
  std::atomic<int> next{0};
  const int ntasks = npoints * cfg.trials;

  auto worker = [&]() {
    for (;;) {
      const int task = next.fetch_add(1);
      if (task >= ntasks) return;
      const int point = task / cfg.trials;
      const int trial = task % cfg.trials;
      const ScenarioConfig sc = scenario_for_point(cfg, points[point]);
      const QosRequirements reqs = sc.requirements();
      const std::uint64_t seed = channel_seed(cfg.master_seed, point, trial);
      const ChannelSet ch = generate_channels(seed, sc.topology, sc.variances, sc.noise);

      // shared channel draw across schemes; the full scheme may lazily rerun
      // from the no-jamming solution to honor the nested-feasible-set bound
      std::vector<RunRecord> row(nschemes);
      int full_at = -1, nojam_at = -1;
      for (int s = 0; s < nschemes; ++s) {
        if (cfg.schemes[s] == Scheme::noma_jamming) full_at = s;
        if (cfg.schemes[s] == Scheme::noma_nojam) nojam_at = s;
      }
      CovarianceSolution nojam_relaxed;
      bool have_nojam_relaxed = false;
      for (int s = 0; s < nschemes; ++s) {
        if (s == nojam_at) {
          row[s] = run_scheme(cfg.schemes[s], ch, reqs, sc.eh, sc.solver, seed, std::nullopt,
                              &nojam_relaxed);
          have_nojam_relaxed = row[s].status != "infeasible";
        } else {
          row[s] = run_scheme(cfg.schemes[s], ch, reqs, sc.eh, sc.solver, seed);
        }
      }
      if (full_at >= 0 && have_nojam_relaxed && row[nojam_at].objective_w &&
          (!row[full_at].objective_w ||
           *row[full_at].objective_w > *row[nojam_at].objective_w + 1e-6)) {
        // second start anchored at the no-jamming optimum, which is feasible
        // for the full scheme with zero AN; keep the better outcome
        RunRecord rerun = run_scheme(Scheme::noma_jamming, ch, reqs, sc.eh, sc.solver, seed,
                                     nojam_relaxed);
        if (rerun.objective_w &&
            (!row[full_at].objective_w || *rerun.objective_w < *row[full_at].objective_w))
          row[full_at] = rerun;
      }
      for (int s = 0; s < nschemes; ++s) {
        RunRecord &rec = row[s];
        rec.sweep_param = to_string(cfg.sweep);
        rec.sweep_value = iter_mode ? 0.0 : points[point];
        rec.trial = trial;
        records[(static_cast<size_t>(point) * cfg.trials + trial) * nschemes + s] =
            std::move(rec);
      }
    }
  };

  int jobs = cfg.jobs > 0 ? cfg.jobs : static_cast<int>(std::thread::hardware_concurrency());
  jobs = std::max(1, std::min(jobs, ntasks));
  std::vector<std::thread> pool;
  for (int t = 1; t < jobs; ++t) pool.emplace_back(worker);
  worker();
  for (auto &th : pool) th.join();
  return records;
}

std::vector<SummaryPoint> summarize(const std::vector<RunRecord> &records) {
  std::vector<SummaryPoint> out;
  if (records.empty()) return out;
  // stable grouping by (scheme, sweep_value) in first-appearance order
  for (const auto &r : records) {
    bool seen = false;
    for (const auto &s : out)
      seen = seen || (s.scheme == r.scheme && s.sweep_value == r.sweep_value);
    if (!seen) {
      SummaryPoint s;
      s.scheme = r.scheme;
      s.sweep_param = r.sweep_param;
      s.sweep_value = r.sweep_value;
      out.push_back(s);
    }
  }
  std::sort(out.begin(), out.end(), [](const SummaryPoint &a, const SummaryPoint &b) {
    return a.scheme != b.scheme ? a.scheme < b.scheme : a.sweep_value < b.sweep_value;
  });
  for (auto &s : out) {
    std::vector<double> obj;
    for (const auto &r : records)
      if (r.scheme == s.scheme && r.sweep_value == s.sweep_value) {
        ++s.runs;
        if (r.objective_w) {
          ++s.converged;
          obj.push_back(*r.objective_w);
        }
      }
    s.feasibility_rate = s.runs ? static_cast<double>(s.converged) / s.runs : 0.0;
    if (obj.empty()) {
      s.mean_w = s.median_w = s.ci_lo_w = s.ci_hi_w = nan_value();
      continue;
    }
    std::vector<double> sorted = obj;
    std::sort(sorted.begin(), sorted.end());
    const size_t n = sorted.size();
    s.median_w = n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
    double sum = 0.0;
    for (double v : obj) sum += v;
    s.mean_w = sum / n;
    // bootstrap CI of the mean, seeded from the group identity
    std::uint64_t bseed = seed_combine(0xb007ULL, splitmix64(static_cast<std::uint64_t>(n)));
    for (char c : s.scheme) bseed = seed_combine(bseed, static_cast<std::uint64_t>(c));
    std::uint64_t vb;
    std::memcpy(&vb, &s.sweep_value, 8);
    bseed = seed_combine(bseed, vb);
    Rng rng(bseed);
    std::vector<double> means;
    means.reserve(1000);
    for (int b = 0; b < 1000; ++b) {
      double bs = 0.0;
      for (size_t i = 0; i < n; ++i) bs += obj[static_cast<size_t>(rng.uniform() * n)];
      means.push_back(bs / n);
    }
    std::sort(means.begin(), means.end());
    s.ci_lo_w = means[24];
    s.ci_hi_w = means[974];
  }
  return out;
}

namespace {

std::string opt_to_csv(const std::optional<double> &v) {
  return v ? format_double(*v) : std::string();
}

void write_file(const std::filesystem::path &p, const std::string &content) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << content;
}

std::string svg_plot(const std::vector<SummaryPoint> &summary,
                     const std::vector<RunRecord> &records, const ExperimentConfig &cfg);

}  // namespace

std::string records_csv_header() {
  return "scheme,sweep_param,sweep_value,trial,seed,status,objective_w,iterations,restarts,"
         "max_rank_ratio,extracted,margin_c1,margin_c2,margin_c3,margin_c4,margin_c5,"
         "channel_digest";
}

std::string record_to_csv(const RunRecord &r) {
  std::ostringstream os;
  os << r.scheme << ',' << r.sweep_param << ',' << format_double(r.sweep_value) << ',' << r.trial
     << ',' << r.seed << ',' << r.status << ',' << opt_to_csv(r.objective_w) << ','
     << r.iterations << ',' << r.restarts << ',' << format_double(r.max_rank_ratio) << ','
     << (r.extracted ? 1 : 0) << ',' << format_double(r.margin_c1) << ','
     << format_double(r.margin_c2) << ',' << format_double(r.margin_c3) << ','
     << format_double(r.margin_c4) << ',' << format_double(r.margin_c5) << ','
     << r.channel_digest;
  return os.str();
}

void export_results(const std::vector<RunRecord> &records,
                    const std::vector<SummaryPoint> &summary, const ExperimentConfig &cfg) {
  namespace fs = std::filesystem;
  const fs::path dir(cfg.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + dir.string());

  {
    std::ostringstream os;
    os << records_csv_header() << '\n';
    for (const auto &r : records) os << record_to_csv(r) << '\n';
    write_file(dir / "records.csv", os.str());
  }
  {
    std::ostringstream os;
    os << "scheme,sweep_param,sweep_value,runs,converged,feasibility_rate,mean_w,median_w,"
          "ci_lo_w,ci_hi_w\n";
    for (const auto &s : summary)
      os << s.scheme << ',' << s.sweep_param << ',' << format_double(s.sweep_value) << ','
         << s.runs << ',' << s.converged << ',' << format_double(s.feasibility_rate) << ','
         << format_double(s.mean_w) << ',' << format_double(s.median_w) << ','
         << format_double(s.ci_lo_w) << ',' << format_double(s.ci_hi_w) << '\n';
    write_file(dir / "summary.csv", os.str());
  }
  {
    // wall-clock data is inherently run-dependent, hence a separate file
    std::ostringstream os;
    os << "scheme,sweep_value,trial,wall_ms\n";
    for (const auto &r : records)
      os << r.scheme << ',' << format_double(r.sweep_value) << ',' << r.trial << ','
         << format_double(r.wall_ms) << '\n';
    write_file(dir / "timings.csv", os.str());
  }
  if (cfg.sweep == SweepKind::iterations) {
    std::ostringstream os;
    os << "scheme,trial,iteration,objective_w\n";
    for (const auto &r : records)
      for (size_t i = 0; i < r.trace.size(); ++i)
        os << r.scheme << ',' << r.trial << ',' << (i + 1) << ',' << format_double(r.trace[i])
           << '\n';
    write_file(dir / "traces.csv", os.str());
  }
  {
    std::ostringstream os;
    os << "{\n  \"version\": \"" << kVersion << "\",\n";
    os << "  \"seed_rule\": \"channel seed = mix(master, point, trial); shared across schemes\",\n";
    os << "  \"scheme_notes\": {\n";
    os << "    \"noma-jamming\": \"joint PBS/CBS design with CBS artificial noise; paired runs "
          "may take a second start from the no-jamming solution and keep the better result\",\n";
    os << "    \"noma-nojam\": \"identical pipeline with the CBS artificial-noise covariance "
          "fixed to zero\",\n";
    os << "    \"oma-tdma\": \"equal time slots, one SU per slot, shared PBS covariances and AN "
          "across slots, per-slot primary constraints, slot-averaged harvested power, "
          "time-averaged power objective\"\n";
    os << "  },\n  \"config\": " << config_to_json(cfg) << "\n}\n";
    write_file(dir / "metadata.json", os.str());
  }
  write_file(dir / "plot.svg", svg_plot(summary, records, cfg));
}

namespace {

// tiny hand-rolled SVG line plot; vector output keeps the exports
// self-contained and diffable
std::string svg_plot(const std::vector<SummaryPoint> &summary,
                     const std::vector<RunRecord> &records, const ExperimentConfig &cfg) {
  const int width = 640, height = 440, ml = 70, mr = 20, mt = 30, mb = 50;
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
     << "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  const char *colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};

  struct Series {
    std::string name;
    std::vector<std::pair<double, double>> pts;  // x, mW
  };
  std::vector<Series> series;
  std::string xlabel;
  if (cfg.sweep == SweepKind::iterations) {
    xlabel = "iteration";
    // median objective trace with the interquartile band per scheme
    for (const auto scheme : cfg.schemes) {
      Series med{std::string(to_string(scheme)) + " median", {}};
      size_t longest = 0;
      for (const auto &r : records)
        if (r.scheme == to_string(scheme)) longest = std::max(longest, r.trace.size());
      for (size_t i = 0; i < longest; ++i) {
        std::vector<double> vals;
        for (const auto &r : records)
          if (r.scheme == to_string(scheme) && i < r.trace.size())
            vals.push_back(watts_to_mw(r.trace[i]));
        if (vals.empty()) continue;
        std::sort(vals.begin(), vals.end());
        med.pts.push_back({static_cast<double>(i + 1), vals[vals.size() / 2]});
      }
      if (!med.pts.empty()) series.push_back(std::move(med));
    }
  } else {
    xlabel = to_string(cfg.sweep);
    for (const auto scheme : cfg.schemes) {
      Series s{to_string(scheme), {}};
      for (const auto &p : summary)
        if (p.scheme == to_string(scheme) && std::isfinite(p.mean_w))
          s.pts.push_back({p.sweep_value, watts_to_mw(p.mean_w)});
      if (!s.pts.empty()) series.push_back(std::move(s));
    }
  }

  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto &s : series)
    for (auto [x, y] : s.pts) {
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
  if (series.empty()) {
    os << "<text x=\"20\" y=\"40\">no converged runs</text>\n</svg>\n";
    return os.str();
  }
  if (xmax <= xmin) xmax = xmin + 1;
  if (ymax <= ymin) ymax = ymin + 1;
  const double ypad = 0.08 * (ymax - ymin);
  ymin -= ypad;
  ymax += ypad;
  auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (width - ml - mr); };
  auto py = [&](double y) { return height - mb - (y - ymin) / (ymax - ymin) * (height - mt - mb); };

  os << "<line x1=\"" << ml << "\" y1=\"" << height - mb << "\" x2=\"" << width - mr << "\" y2=\""
     << height - mb << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << height - mb
     << "\" stroke=\"black\"/>\n";
  os << "<text x=\"" << (ml + width - mr) / 2 << "\" y=\"" << height - 12
     << "\" text-anchor=\"middle\" font-size=\"13\">" << xlabel << "</text>\n";
  os << "<text x=\"16\" y=\"" << (mt + height - mb) / 2
     << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 16 "
     << (mt + height - mb) / 2 << ")\">power [mW]</text>\n";
  for (int g = 0; g <= 4; ++g) {
    const double xv = xmin + g * (xmax - xmin) / 4.0;
    const double yv = ymin + g * (ymax - ymin) / 4.0;
    os << "<text x=\"" << px(xv) << "\" y=\"" << height - mb + 16
       << "\" text-anchor=\"middle\" font-size=\"11\">" << format_double(std::round(xv * 100) / 100)
       << "</text>\n";
    os << "<text x=\"" << ml - 6 << "\" y=\"" << py(yv) + 4
       << "\" text-anchor=\"end\" font-size=\"11\">" << format_double(std::round(yv * 1000) / 1000)
       << "</text>\n";
  }
  for (size_t si = 0; si < series.size(); ++si) {
    const auto &s = series[si];
    const char *col = colors[si % 4];
    os << "<polyline fill=\"none\" stroke=\"" << col << "\" stroke-width=\"1.5\" points=\"";
    for (auto [x, y] : s.pts) os << px(x) << ',' << py(y) << ' ';
    os << "\"/>\n";
    for (auto [x, y] : s.pts)
      os << "<circle cx=\"" << px(x) << "\" cy=\"" << py(y) << "\" r=\"3\" fill=\"" << col
         << "\"/>\n";
    os << "<text x=\"" << width - mr - 6 << "\" y=\"" << mt + 16 * (si + 1)
       << "\" text-anchor=\"end\" font-size=\"12\" fill=\"" << col << "\">" << s.name
       << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace

}  // namespace secnoma
