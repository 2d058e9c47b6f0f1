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

#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "secnoma/experiments.hpp"

using namespace secnoma;

int main(int argc, char **argv) {
  CLI::App app{"secnoma: secure MISO-NOMA cognitive-radio SWIPT power-minimization simulator"};
  app.footer("Environment overrides mirror the flags with a SECNOMA_ prefix "
             "(e.g. SECNOMA_TRIALS).");

  std::string config_path, experiment = "fig2a", schemes_csv, out_dir;
  int trials = -1, jobs = -1;
  std::uint64_t seed = 0;
  bool have_seed = false, dump_subproblem = false, print_config = false;

  app.add_option("--config", config_path, "scenario/experiment JSON file")
      ->envname("SECNOMA_CONFIG");
  app.add_option("--experiment", experiment,
                 "fig2a (power vs secondary EHR count), fig2b (objective traces), "
                 "fig2c (power vs PU secrecy target), custom (sweep from config)")
      ->check(CLI::IsMember({"fig2a", "fig2b", "fig2c", "custom"}))
      ->envname("SECNOMA_EXPERIMENT");
  app.add_option("--trials", trials, "Monte Carlo trials per sweep point")
      ->envname("SECNOMA_TRIALS");
  auto *seed_opt =
      app.add_option("--seed", seed, "master seed")->envname("SECNOMA_SEED");
  app.add_option("--schemes", schemes_csv,
                 "comma-separated subset of noma-jamming,noma-nojam,oma-tdma")
      ->envname("SECNOMA_SCHEMES");
  app.add_option("--out", out_dir, "output directory")->envname("SECNOMA_OUT");
  app.add_option("--jobs", jobs, "worker threads (0 = hardware)")->envname("SECNOMA_JOBS");
  app.add_flag("--dump-subproblem", dump_subproblem,
               "write the first convex subproblem of trial 0 to stdout and exit");
  app.add_flag("--print-config", print_config, "echo the effective config and exit");

  try {
    app.parse(argc, argv);
    have_seed = seed_opt->count() > 0 || std::getenv("SECNOMA_SEED");
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  ExperimentConfig cfg;
  try {
    if (!config_path.empty()) cfg = load_experiment_config(config_path);
    if (experiment == "fig2a") {
      cfg.sweep = SweepKind::ehr_count;
      if (config_path.empty() || cfg.sweep_values.empty()) cfg.sweep_values = {1, 2, 3, 4};
    } else if (experiment == "fig2b") {
      cfg.sweep = SweepKind::iterations;
      cfg.sweep_values.clear();
    } else if (experiment == "fig2c") {
      cfg.sweep = SweepKind::gamma_p;
      cfg.sweep_values = {0.5, 1.0, 1.5, 2.0, 2.5};
    }  // custom: whatever the config says
    if (trials > 0) cfg.trials = trials;
    if (have_seed) cfg.master_seed = seed;
    if (jobs >= 0) cfg.jobs = jobs;
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    if (!schemes_csv.empty()) {
      cfg.schemes.clear();
      std::stringstream ss(schemes_csv);
      std::string item;
      while (std::getline(ss, item, ',')) cfg.schemes.push_back(scheme_from_string(item));
    }
    cfg.validate();
  } catch (const std::exception &e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  }

  if (print_config) {
    std::cout << config_to_json(cfg) << "\n";
    return 0;
  }
  if (dump_subproblem) {
    const ScenarioConfig sc =
        cfg.sweep == SweepKind::iterations ? cfg.scenario : [&] {
          ExperimentConfig c = cfg;
          ScenarioConfig s = c.scenario;
          if (c.sweep == SweepKind::ehr_count)
            s.topology.secondary_ehrs = static_cast<int>(c.sweep_values.front());
          else if (c.sweep == SweepKind::gamma_p)
            s.gamma_p = c.sweep_values.front();
          return s;
        }();
    const ChannelSet ch = generate_channels(channel_seed(cfg.master_seed, 0, 0), sc.topology,
                                            sc.variances, sc.noise);
    try {
      const ScaIterate it =
          initialize_iterate(ch, sc.requirements(), sc.eh, channel_seed(cfg.master_seed, 0, 0));
      build_subproblem(ch, sc.requirements(), sc.eh, it).program.dump(std::cout);
    } catch (const init_infeasible_error &e) {
      std::cerr << e.what() << "\n";
      return 2;
    }
    return 0;
  }

  std::cerr << "running " << (cfg.sweep == SweepKind::iterations ? 1 : cfg.sweep_values.size())
            << " sweep point(s) x " << cfg.trials << " trial(s) x " << cfg.schemes.size()
            << " scheme(s)...\n";
  const std::vector<RunRecord> records = run_sweep(cfg);
  const std::vector<SummaryPoint> summary = summarize(records);
  try {
    export_results(records, summary, cfg);
  } catch (const std::exception &e) {
    std::cerr << "export error: " << e.what() << "\n";
    return 1;
  }

  int converged = 0;
  for (const auto &r : records) converged += r.status == "converged";
  std::cerr << "wrote " << records.size() << " records to " << cfg.output_dir << " ("
            << converged << " converged)\n";
  for (const auto &s : summary)
    if (s.converged > 0)
      std::cerr << "  " << s.scheme << " @" << s.sweep_value << ": mean "
                << watts_to_mw(s.mean_w) << " mW over " << s.converged << "/" << s.runs << "\n";
  return converged == 0 ? 2 : 0;
}
