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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "secnoma/sca.hpp"

using namespace secnoma;

namespace {

NoiseFloors noise_all(double w) {
  NoiseFloors n;
  n.pu = n.su = n.primary_ehr = n.secondary_ehr = w;
  return n;
}

// reduced two-tier network that keeps one full-size solve around a second
NetworkTopology topo_mid() {
  NetworkTopology t;
  t.clusters = 2;
  t.pus_per_cluster = {1, 1};
  t.ehrs_per_cluster = {1, 1};
  t.sus = 2;
  t.secondary_ehrs = 1;
  t.pbs_antennas = 4;
  t.cbs_antennas = 3;
  return t;
}

struct Counts {
  int affine = 0, exps = 0, blocks = 0, scalars = 0;
};

// independent census of the subproblem pieces
Counts census(const NetworkTopology &t, bool with_an) {
  Counts c;
  const int m_eav = [&] {
    int n = 0;
    for (int k : t.ehrs_per_cluster) n += k > 0;
    return n;
  }();
  const int sum_n = t.total_pus(), sum_k = t.total_primary_ehrs();
  const int ns = t.sus, ks = t.secondary_ehrs;
  const int tails = ns * (ns + 1) / 2 - 1;  // (j, z) pairs with j < last
  const bool sec = ks > 0;

  c.affine = 2 * sum_n          // rate budget + interference bound per PU
             + m_eav            // cap upper bracket per observed cluster
             + 2 * sum_k        // eavesdropper budget + numerator bound
             + 2 + (sec ? 1 : 0)  // strongest SU group
             + 2 * ks
             + 2 * (ns - 1)     // decodability budget + floor bracket
             + 2 * tails
             + 2 * ks * (ns - 1)
             + sum_n            // interference caps
             + sum_k + ks;      // harvesting floors
  c.exps = sum_n + m_eav + sum_k + 1 + (sec ? 1 : 0) + ks + tails + ks * (ns - 1) +
           (sec ? (ns - 1) : 0);
  c.blocks = 2 * t.clusters + ns + (with_an ? 1 : 0);
  c.scalars = 2 * sum_n + 3 * m_eav + 2 * sum_k + 2 + (sec ? 3 : 0) + 2 * ks +
              (ns - 1) * (sec ? 4 : 2) + 2 * tails + 2 * ks * (ns - 1);
  return c;
}

ScaIterate anchored_iterate(const ChannelSet &ch, double power) {
  CovarianceSolution sol = CovarianceSolution::zero(ch.topology);
  for (auto &w : sol.w_p) w = power * CMatrix::Identity(w.rows(), w.cols()) / w.rows();
  for (auto &w : sol.sigma_p) w = power * CMatrix::Identity(w.rows(), w.cols()) / w.rows();
  for (auto &w : sol.w_s) w = power * CMatrix::Identity(w.rows(), w.cols()) / w.rows();
  sol.sigma_s = power * CMatrix::Identity(sol.sigma_s.rows(), sol.sigma_s.cols()) / sol.sigma_s.rows();
  return compute_iterate_at(ch, sol);
}

}  // namespace

TEST_CASE("first-order exponential bound: tight at the anchor, conservative elsewhere") {
  for (double yt : {-3.0, -0.5, 0.0, 1.7, 12.0}) {
    const double bound_at_anchor = std::exp(yt) * (yt - yt + 1.0);
    CHECK(bound_at_anchor == doctest::Approx(std::exp(yt)).epsilon(1e-15));
    for (int g = -40; g <= 40; ++g) {
      const double y = yt + 0.25 * g;
      CHECK(std::exp(yt) * (y - yt + 1.0) <= std::exp(y) * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("constraint census matches the closed-form count") {
  // reference two-tier setting
  NetworkTopology t;
  t.clusters = 2;
  t.pus_per_cluster = {1, 1};
  t.ehrs_per_cluster = {1, 1};
  t.sus = 3;
  t.secondary_ehrs = 2;
  t.pbs_antennas = 10;
  t.cbs_antennas = 5;
  const ChannelSet ch = generate_channels(3, t, {}, {});
  EhCircuitParams eh;
  const QosRequirements reqs =
      QosRequirements::uniform(t, 2.0, 1.0, mw_to_watts(10), mw_to_watts(15), mw_to_watts(5));
  const ScaIterate it = anchored_iterate(ch, mw_to_watts(4.0));

  for (bool with_an : {true, false}) {
    const ConvexSubproblem prob = build_subproblem(ch, reqs, eh, it, {with_an});
    const Counts want = census(t, with_an);
    CHECK(static_cast<int>(prob.program.affine().size()) == want.affine);
    CHECK(static_cast<int>(prob.program.exp_rows().size()) == want.exps);
    CHECK(static_cast<int>(prob.program.blocks().size()) == want.blocks);
    const int mat_vars = 2 * t.clusters * t.pbs_antennas * t.pbs_antennas +
                         (t.sus + (with_an ? 1 : 0)) * t.cbs_antennas * t.cbs_antennas;
    CHECK(prob.program.nvars() == mat_vars + want.scalars);
  }

  // sweeping the secondary EHR count changes the census accordingly
  for (int ks : {0, 1, 4}) {
    NetworkTopology t2 = t;
    t2.secondary_ehrs = ks;
    const ChannelSet ch2 = generate_channels(3, t2, {}, {});
    const ConvexSubproblem prob =
        build_subproblem(ch2, reqs, eh, anchored_iterate(ch2, mw_to_watts(4.0)), {});
    const Counts want = census(t2, true);
    CHECK(static_cast<int>(prob.program.affine().size()) == want.affine);
    CHECK(static_cast<int>(prob.program.exp_rows().size()) == want.exps);
  }
}

TEST_CASE("initialization is deterministic and self-consistent") {
  NetworkTopology t;  // reference setting incl. ten PBS antennas
  const ChannelSet ch = generate_channels(0, t, {}, {});
  EhCircuitParams eh;
  const QosRequirements reqs =
      QosRequirements::uniform(t, 2.0, 1.0, mw_to_watts(10), mw_to_watts(15), mw_to_watts(5));
  const ScaIterate a = initialize_iterate(ch, reqs, eh, 0);
  const ScaIterate b = initialize_iterate(ch, reqs, eh, 0);
  CHECK(a.pu_log_interf == b.pu_log_interf);
  CHECK(a.su_log_total == b.su_log_total);
  CHECK(total_power(a.anchor) == total_power(b.anchor));

  // every anchored log reproduces the quantity it brackets, with equality
  const PowerTerms pt = power_terms(ch, a.anchor);
  for (int m = 0; m < t.clusters; ++m)
    for (int i = 0; i < t.pus_per_cluster[m]; ++i) {
      const double interf = pt.gamma_p[m][i] - quad_form(a.anchor.w_p[m], ch.h_p[m][i]);
      CHECK(std::exp(a.pu_log_interf[m][i]) ==
            doctest::Approx(interf / ch.sigma2_p[m][i]).epsilon(1e-12));
      CHECK(std::exp(a.pu_log_total[m][i]) ==
            doctest::Approx(pt.gamma_p[m][i] / ch.sigma2_p[m][i]).epsilon(1e-12));
    }
  for (int l = 0; l < t.secondary_ehrs; ++l)
    CHECK(std::exp(a.su_eav_log_total[l]) ==
          doctest::Approx(pt.lambda_e[l][t.sus - 1] / ch.sigma2_e_sec[l]).epsilon(1e-12));

  // the anchor meets the interference cap and the harvesting thresholds
  const FeasibilityReport rep = verify_feasibility(ch, a.anchor, reqs, eh);
  CHECK(rep.c3);
  CHECK(rep.c4);
  CHECK(rep.c5);

  // restarts bend the shapes but stay deterministic
  const ScaIterate r1 = initialize_iterate(ch, reqs, eh, 0, 1);
  const ScaIterate r1b = initialize_iterate(ch, reqs, eh, 0, 1);
  CHECK(r1.pu_log_interf == r1b.pu_log_interf);
  CHECK(r1.pu_log_interf != a.pu_log_interf);
}

TEST_CASE("initialization reports contradictory requirements") {
  NetworkTopology t = topo_mid();
  const ChannelSet ch = generate_channels(5, t, {}, {});
  EhCircuitParams eh;
  // interference cap far below what the isotropic start radiates at 1 mW
  QosRequirements reqs = QosRequirements::uniform(t, 1.0, 0.5, 1e-9, mw_to_watts(15),
                                                  mw_to_watts(5));
  CHECK_THROWS_AS(initialize_iterate(ch, reqs, eh, 1), init_infeasible_error);
}

TEST_CASE("iterate encode/decode round-trips through the variable map") {
  NetworkTopology t = topo_mid();
  const ChannelSet ch = generate_channels(9, t, {}, noise_all(1e-3));
  EhCircuitParams eh;
  const QosRequirements reqs =
      QosRequirements::uniform(t, 1.0, 0.5, mw_to_watts(10), mw_to_watts(15), mw_to_watts(5));
  const ScaIterate it = anchored_iterate(ch, mw_to_watts(3.0));
  const ConvexSubproblem prob = build_subproblem(ch, reqs, eh, it, {});
  const RVector x = prob.map.encode(it);
  CovarianceSolution sol;
  ScaIterate back;
  prob.map.decode(x, sol, back);
  CHECK((sol.w_p[0] - it.anchor.w_p[0]).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((sol.sigma_s - it.anchor.sigma_s).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(back.pu_log_interf == it.pu_log_interf);
  CHECK(back.su_log_cap_lo == doctest::Approx(it.su_log_cap_lo));
  CHECK(back.sic_log_total == it.sic_log_total);
}

TEST_CASE("near-vacuous requirements collapse to almost-free operation") {
  // noise floor comparable to the start power, so the first linearization
  // does not carry a residual interference footprint; no harvesters
  NetworkTopology t = topo_mid();
  t.ehrs_per_cluster = {0, 0};
  t.secondary_ehrs = 0;
  const ChannelSet ch = generate_channels(13, t, {}, noise_all(1.0));
  EhCircuitParams eh;
  QosRequirements reqs = QosRequirements::uniform(t, 0.0, 0.0, mw_to_watts(10), 1e-12, 1e-12);
  SolverSettings st;
  const ScaResult r = run_sca(ch, reqs, eh, st, 7);
  REQUIRE(r.status == ScaResult::Status::converged);
  CHECK(r.iterations <= 2);
  CHECK(r.objective <= 1e-8);
}

TEST_CASE("update_iterate requires optimality and is the identity at a fixed point") {
  NetworkTopology t = topo_mid();
  const ChannelSet ch = generate_channels(17, t, {}, {});
  EhCircuitParams eh;
  const QosRequirements reqs =
      QosRequirements::uniform(t, 1.0, 0.5, mw_to_watts(10), mw_to_watts(15), mw_to_watts(5));
  SolverSettings st;
  const ScaIterate it0 = initialize_iterate(ch, reqs, eh, 3);
  const ConvexSubproblem prob = build_subproblem(ch, reqs, eh, it0, {});
  SubproblemSolution ss = solve_subproblem(prob, st);
  REQUIRE(ss.status == SolveStatus::optimal);
  const ScaIterate next = update_iterate(ss);
  CHECK(next.pu_log_interf == ss.aux.pu_log_interf);
  CHECK(next.all_finite());
  // optimal auxiliaries re-solve the same point when re-anchored exactly
  SubproblemSolution again = ss;
  again.aux = next;
  CHECK(update_iterate(again).su_log_total == next.su_log_total);

  ss.status = SolveStatus::infeasible;
  CHECK_THROWS_AS(update_iterate(ss), std::logic_error);
}

TEST_CASE("subproblem reports infeasibility rather than fabricating answers") {
  NetworkTopology t = topo_mid();
  const ChannelSet ch = generate_channels(23, t, {}, {});
  EhCircuitParams eh;
  // the cap forbids any CBS radiation toward PUs while the secondary EHR
  // needs CBS-scale power: no subproblem can satisfy both
  QosRequirements reqs = QosRequirements::uniform(t, 6.0, 6.0, 1e-12, mw_to_watts(23.9),
                                                  mw_to_watts(23.9));
  const ScaIterate it = anchored_iterate(ch, mw_to_watts(1.0));
  const ConvexSubproblem prob = build_subproblem(ch, reqs, eh, it, {});
  const SubproblemSolution ss = solve_subproblem(prob, {});
  CHECK(ss.status == SolveStatus::infeasible);
}

TEST_CASE("two-variable instance matches an exhaustive grid search") {
  // single-antenna stations, one PU, one SU, no harvesters: the only degrees
  // of freedom are the two transmit powers
  NetworkTopology t;
  t.clusters = 1;
  t.pus_per_cluster = {1};
  t.ehrs_per_cluster = {0};
  t.sus = 1;
  t.secondary_ehrs = 0;
  t.pbs_antennas = 1;
  t.cbs_antennas = 1;
  EhCircuitParams eh;
  const QosRequirements reqs =
      QosRequirements::uniform(t, 0.6, 0.4, mw_to_watts(10), mw_to_watts(1), mw_to_watts(1));
  SolverSettings st;
  st.tolerance = 1e-9;  // stop threshold matched to the micro-watt scale here

  for (std::uint64_t seed : {11ull, 12ull, 13ull}) {
    const ChannelSet ch = generate_channels(seed, t, {}, noise_all(1e-3));
    const ScaResult r = run_sca(ch, reqs, eh, st, seed);
    REQUIRE(r.status == ScaResult::Status::converged);

    auto feasible = [&](double p1, double p3) {
      CovarianceSolution s = CovarianceSolution::zero(t);
      s.w_p[0](0, 0) = p1;
      s.w_s[0](0, 0) = p3;
      const PowerTerms pt = power_terms(ch, s);
      if (quad_form(s.cbs_total(), ch.f_s[0][0]) > reqs.upsilon[0][0]) return false;
      return pu_secrecy_rate(ch, pt, s, 0, 0) >= reqs.gamma_p[0][0] &&
             su_secrecy_rate(ch, pt, s, 0) >= reqs.gamma_s[0];
    };
    // refining grid search; the oracle is considered converged when one more
    // refinement moves the optimum by less than 1%
    double lo1 = 0, hi1 = 0.2, lo3 = 0, hi3 = 0.2;
    double best = std::numeric_limits<double>::infinity(), b1 = 0, b3 = 0;
    double prev_best = best;
    for (int round = 0; round < 10; ++round) {
      const int grid = 80;
      for (int i = 0; i <= grid; ++i)
        for (int j = 0; j <= grid; ++j) {
          const double p1 = lo1 + (hi1 - lo1) * i / grid;
          const double p3 = lo3 + (hi3 - lo3) * j / grid;
          if (p1 + p3 < best && feasible(p1, p3)) {
            best = p1 + p3;
            b1 = p1;
            b3 = p3;
          }
        }
      REQUIRE(std::isfinite(best));
      const double span1 = (hi1 - lo1) / grid * 6, span3 = (hi3 - lo3) / grid * 6;
      lo1 = std::max(0.0, b1 - span1);
      hi1 = b1 + span1;
      lo3 = std::max(0.0, b3 - span3);
      hi3 = b3 + span3;
      if (round >= 3 && std::abs(best - prev_best) <= 1e-4 * best) break;
      prev_best = best;
    }
    CHECK(std::abs(r.objective - best) <= 0.001 * best + 2e-9);
  }
}

TEST_CASE("full pipeline: monotone trace, convergence, feasibility transfer") {
  NetworkTopology t = topo_mid();
  EhCircuitParams eh;
  const QosRequirements reqs =
      QosRequirements::uniform(t, 1.5, 0.8, mw_to_watts(10), mw_to_watts(15), mw_to_watts(5));
  SolverSettings st;
  int converged = 0;
  for (std::uint64_t seed : {101ull, 102ull, 103ull}) {
    const ChannelSet ch = generate_channels(seed, t, {}, {});
    const ScaResult r = run_sca(ch, reqs, eh, st, seed);
    if (r.status != ScaResult::Status::converged) continue;
    ++converged;
    REQUIRE(r.trace.size() >= 2);
    for (size_t i = 1; i < r.trace.size(); ++i) CHECK(r.trace[i] <= r.trace[i - 1] + 1e-9);
    CHECK(std::abs(r.trace.back() - r.trace[r.trace.size() - 2]) <= st.tolerance);
    CHECK(r.iterations <= st.max_iterations);
    const FeasibilityReport rep = verify_feasibility(ch, r.relaxed, reqs, eh, {1e-6, 1e-9});
    CHECK(rep.all_satisfied());
    CHECK(r.objective == doctest::Approx(total_power(r.relaxed)).epsilon(1e-9));

    // determinism of the whole driver
    const ScaResult r2 = run_sca(ch, reqs, eh, st, seed);
    CHECK(r2.trace == r.trace);
  }
  CHECK(converged >= 2);
}

TEST_CASE("anchored start descends below the anchor objective") {
  NetworkTopology t = topo_mid();
  const ChannelSet ch = generate_channels(31, t, {}, {});
  EhCircuitParams eh;
  const QosRequirements reqs =
      QosRequirements::uniform(t, 1.0, 0.5, mw_to_watts(10), mw_to_watts(15), mw_to_watts(5));
  SolverSettings st;
  const ScaResult base = run_sca(ch, reqs, eh, st, 31);
  REQUIRE(base.status == ScaResult::Status::converged);
  ScaOptions opts;
  opts.anchor = base.relaxed;
  const ScaResult warm = run_sca(ch, reqs, eh, st, 31, opts);
  REQUIRE(warm.status == ScaResult::Status::converged);
  CHECK(warm.objective <= base.objective + 1e-6);
}
