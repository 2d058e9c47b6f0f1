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

#include "secnoma/metrics.hpp"

using namespace secnoma;

namespace {

NetworkTopology topo_small() {
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

// noise floors large enough that ratios stay well scaled in unit tests
NoiseFloors noise_all(double w) {
  NoiseFloors n;
  n.pu = n.su = n.primary_ehr = n.secondary_ehr = w;
  return n;
}

// random rank-one + AN solution built from explicit factors so a symbol-level
// simulation can reproduce it
struct FactoredSolution {
  std::vector<CVector> w_p, w_s;
  std::vector<CMatrix> gp;  // Sigma_p = gp gp^H
  CMatrix gs;               // Sigma_s = gs gs^H
  CovarianceSolution sol;
};

FactoredSolution random_factored(const NetworkTopology &t, std::uint64_t seed, double scale) {
  Rng rng(seed);
  FactoredSolution f;
  for (int m = 0; m < t.clusters; ++m) {
    f.w_p.push_back(std::sqrt(scale) * rng.cgauss_vector(t.pbs_antennas, 1.0));
    CMatrix g(t.pbs_antennas, 2);
    for (int c = 0; c < 2; ++c) g.col(c) = std::sqrt(scale / 4) * rng.cgauss_vector(t.pbs_antennas, 1.0);
    f.gp.push_back(g);
  }
  for (int j = 0; j < t.sus; ++j)
    f.w_s.push_back(std::sqrt(scale) * rng.cgauss_vector(t.cbs_antennas, 1.0));
  f.gs = CMatrix(t.cbs_antennas, 2);
  for (int c = 0; c < 2; ++c) f.gs.col(c) = std::sqrt(scale / 4) * rng.cgauss_vector(t.cbs_antennas, 1.0);

  f.sol = CovarianceSolution::zero(t);
  for (int m = 0; m < t.clusters; ++m) {
    f.sol.w_p[m] = f.w_p[m] * f.w_p[m].adjoint();
    f.sol.sigma_p[m] = f.gp[m] * f.gp[m].adjoint();
  }
  for (int j = 0; j < t.sus; ++j) f.sol.w_s[j] = f.w_s[j] * f.w_s[j].adjoint();
  f.sol.sigma_s = f.gs * f.gs.adjoint();
  return f;
}

}  // namespace

TEST_CASE("zero covariances leave only noise") {
  NetworkTopology t = topo_small();
  const ChannelSet ch = generate_channels(3, t, {}, noise_all(1e-3));
  const PowerTerms pt = power_terms(ch, CovarianceSolution::zero(t));
  CHECK(pt.gamma_p[0][0] == doctest::Approx(1e-3).epsilon(1e-12));
  CHECK(pt.gamma_e[1][0] == 0.0);
  CHECK(pt.lambda_e[0][0] == doctest::Approx(1e-3).epsilon(1e-12));
  CHECK(pt.lambda_e[0][1] == doctest::Approx(1e-3).epsilon(1e-12));
}

TEST_CASE("single-antenna identity: received power is p plus noise") {
  NetworkTopology t;
  t.clusters = 1;
  t.pus_per_cluster = {1};
  t.ehrs_per_cluster = {0};
  t.sus = 1;
  t.secondary_ehrs = 0;
  t.pbs_antennas = 1;
  t.cbs_antennas = 1;
  ChannelSet ch = generate_channels(1, t, {}, noise_all(1.0));
  ch.h_p[0][0](0) = 1.0;   // unit channel
  ch.f_s[0][0](0) = 0.0;   // no cross link
  CovarianceSolution s = CovarianceSolution::zero(t);
  const double p = 0.37;
  s.w_p[0](0, 0) = p;
  const PowerTerms pt = power_terms(ch, s);
  CHECK(pt.gamma_p[0][0] == doctest::Approx(p + 1.0).epsilon(1e-14));
}

TEST_CASE("received powers match a symbol-level simulation") {
  NetworkTopology t = topo_small();
  const ChannelSet ch = generate_channels(11, t, {}, noise_all(1e-3));
  const FactoredSolution f = random_factored(t, 12, 0.5);
  const PowerTerms pt = power_terms(ch, f.sol);

  // simulate the PU observation: all beams carry unit-power symbols, AN uses
  // the factored covariances, receiver noise added
  Rng rng(77);
  const int samples = 1000000;
  double acc = 0.0;
  const CVector &h = ch.h_p[0][0];
  const CVector &fs = ch.f_s[0][0];
  for (int s = 0; s < samples; ++s) {
    cplx y = 0.0;
    for (int m = 0; m < t.clusters; ++m) {
      y += (h.adjoint() * f.w_p[m])(0) * rng.cgauss(1.0);
      y += (h.adjoint() * (f.gp[m] * rng.cgauss_vector(2, 1.0)))(0);
    }
    for (int j = 0; j < t.sus; ++j) y += (fs.adjoint() * f.w_s[j])(0) * rng.cgauss(1.0);
    y += (fs.adjoint() * (f.gs * rng.cgauss_vector(2, 1.0)))(0);
    y += rng.cgauss(1e-3);
    acc += std::norm(y);
  }
  CHECK(acc / samples == doctest::Approx(pt.gamma_p[0][0]).epsilon(0.01));
}

TEST_CASE("pu secrecy rate: symmetric case gives one bit") {
  NetworkTopology t;
  t.clusters = 1;
  t.pus_per_cluster = {1};
  t.ehrs_per_cluster = {1};
  t.sus = 1;
  t.secondary_ehrs = 0;
  t.pbs_antennas = 2;
  t.cbs_antennas = 2;
  ChannelSet ch = generate_channels(2, t, {}, noise_all(1e-2));
  ch.f_s[0][0].setZero();
  ch.g_emk[0][0].setZero();  // silent eavesdropper channel
  ch.f_emk[0][0].setZero();
  CovarianceSolution s = CovarianceSolution::zero(t);
  // align the beam so the received power equals the noise floor
  const CVector &h = ch.h_p[0][0];
  s.w_p[0] = (1e-2 / h.squaredNorm() / h.squaredNorm()) * (h * h.adjoint());
  const PowerTerms pt = power_terms(ch, s);
  CHECK(quad_form(s.w_p[0], h) == doctest::Approx(1e-2).epsilon(1e-10));
  CHECK(pu_secrecy_rate(ch, pt, s, 0, 0) == doctest::Approx(1.0).epsilon(1e-9));

  // zero information covariance: zero rate
  const CovarianceSolution z = CovarianceSolution::zero(t);
  CHECK(pu_secrecy_rate(ch, power_terms(ch, z), z, 0, 0) == doctest::Approx(0.0));
}

TEST_CASE("su secrecy rate branches coincide for a single secondary user") {
  NetworkTopology t = topo_small();
  t.sus = 1;
  const ChannelSet ch = generate_channels(21, t, {}, noise_all(1e-3));
  const FactoredSolution f = random_factored(t, 22, 0.2);
  const PowerTerms pt = power_terms(ch, f.sol);
  const double direct = su_secrecy_rate(ch, pt, f.sol, 0);
  // the decodability branch evaluated by hand: z can only equal the user itself
  const double ls = pt.lambda_s[0][0];
  const double legit = std::log2(ls / (ls - quad_form(f.sol.w_s[0], ch.h_s[0])));
  double eav = 0.0;
  for (int l = 0; l < t.secondary_ehrs; ++l) {
    const double le = pt.lambda_sl[l][0];
    eav = std::max(eav, std::log2(le / (le - quad_form(f.sol.w_s[0], ch.g_el[l]))));
  }
  CHECK(direct == doctest::Approx(legit - eav).epsilon(1e-12));
}

TEST_CASE("worst-case set: the literal triple equals the full range for three users") {
  NetworkTopology t = topo_small();
  t.sus = 3;
  for (int seed = 0; seed < 5; ++seed) {
    const ChannelSet ch = generate_channels(31 + seed, t, {}, noise_all(1e-3));
    const FactoredSolution f = random_factored(t, 41 + seed, 0.3);
    const PowerTerms pt = power_terms(ch, f.sol);
    for (int j = 0; j + 1 < t.sus; ++j) {
      auto legit_over = [&](std::vector<int> zs) {
        double lo = std::numeric_limits<double>::infinity();
        for (int z : zs) {
          const double ls = pt.lambda_s[j][z];
          lo = std::min(lo, std::log2(ls / (ls - quad_form(f.sol.w_s[j], ch.h_s[z]))));
        }
        return lo;
      };
      // literal reading {j, j+1, Ns} versus every later-decoded user
      std::vector<int> literal = {j, j + 1, t.sus - 1};
      std::vector<int> full;
      for (int z = j; z < t.sus; ++z) full.push_back(z);
      CHECK(legit_over(literal) == doctest::Approx(legit_over(full)).epsilon(1e-13));
    }
  }
}

TEST_CASE("zero eavesdropper channels remove the leakage term") {
  NetworkTopology t = topo_small();
  ChannelSet ch = generate_channels(51, t, {}, noise_all(1e-3));
  for (auto &v : ch.q_el) v.setZero();
  for (auto &v : ch.g_el) v.setZero();
  const FactoredSolution f = random_factored(t, 52, 0.2);
  const PowerTerms pt = power_terms(ch, f.sol);
  const int top = t.sus - 1;
  const double gs = pt.gamma_s[top];
  const double legit = std::log2(gs / (gs - quad_form(f.sol.w_s[top], ch.h_s[top])));
  CHECK(su_secrecy_rate(ch, pt, f.sol, top) == doctest::Approx(legit).epsilon(1e-12));
}

TEST_CASE("harvest curve: exact zero, saturation, midpoint") {
  EhCircuitParams eh;  // a = 1500, b = 2.2 mW, 24 mW cap
  CHECK(harvested_power(0.0, eh) == 0.0);  // exact, not approximate
  const double sat = harvested_power(eh.b + 100.0 / eh.a, eh);
  CHECK(std::abs(sat - eh.p_max) <= 1e-6 * eh.p_max);
  const double psi = eh.psi();
  const double mid_expected = eh.p_max * (0.5 - psi) / (1.0 - psi);
  CHECK(harvested_power(eh.b, eh) == doctest::Approx(mid_expected).epsilon(1e-12));
  CHECK_THROWS_AS(harvested_power(-1e-9, eh), validation_error);
}

TEST_CASE("harvest curve is strictly increasing and bounded") {
  EhCircuitParams eh;
  double prev = -1.0;
  for (int g = 0; g <= 400; ++g) {
    const double rf = g * (eh.b + 30.0 / eh.a) / 400.0;
    const double p = harvested_power(rf, eh);
    CHECK(p > prev);
    CHECK(p <= eh.p_max);
    prev = p;
  }
}

TEST_CASE("rf threshold inverts the harvest curve") {
  EhCircuitParams eh;
  for (double zeta_mw : {1.0, 5.0, 15.0}) {
    const double zeta = mw_to_watts(zeta_mw);
    const double rf = eh_rf_threshold(zeta, eh);
    CHECK(std::abs(harvested_power(rf, eh) - zeta) <= 1e-9 * zeta);
  }
  // 100 random targets across the whole range
  Rng rng(5);
  for (int k = 0; k < 100; ++k) {
    const double zeta = eh.p_max * (1e-6 + 0.999 * rng.uniform());
    const double rf = eh_rf_threshold(zeta, eh);
    CHECK(std::abs(harvested_power(rf, eh) - zeta) <= 1e-9 * zeta);
  }
}

TEST_CASE("rf threshold matches a bisection oracle") {
  EhCircuitParams eh;
  auto bisect = [&](double zeta) {
    double lo = 0.0, hi = eh.b + 200.0 / eh.a;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (harvested_power(mid, eh) < zeta)
        lo = mid;
      else
        hi = mid;
    }
    return 0.5 * (lo + hi);
  };
  for (double zeta_mw : {15.0, 5.0}) {
    const double zeta = mw_to_watts(zeta_mw);
    CHECK(eh_rf_threshold(zeta, eh) == doctest::Approx(bisect(zeta)).epsilon(1e-9));
  }
}

TEST_CASE("rf threshold blows up toward saturation") {
  EhCircuitParams eh;
  double prev = 0.0;
  for (double frac : {0.5, 0.9, 0.99, 0.999999, 1.0 - 1e-12}) {
    const double thr = eh_rf_threshold(frac * eh.p_max, eh);
    CHECK(thr > prev);
    prev = thr;
  }
  // log-domain divergence: within 1e-12 of saturation the required input
  // exceeds the midpoint by ~ln(1e12)/a
  CHECK(prev > eh.b + 25.0 / eh.a);
  CHECK_THROWS_AS(eh_rf_threshold(eh.p_max, eh), infeasible_requirement_error);
  CHECK_THROWS_AS(eh_rf_threshold(0.0, eh), validation_error);
}

TEST_CASE("total power: zero, identity, eigenvalue oracle") {
  NetworkTopology t = topo_small();
  CovarianceSolution z = CovarianceSolution::zero(t);
  CHECK(total_power(z) == 0.0);
  z.w_p[0] = CMatrix::Identity(4, 4);
  CHECK(total_power(z) == doctest::Approx(4.0));
  const FactoredSolution f = random_factored(t, 61, 0.7);
  double eig_sum = 0.0;
  auto add = [&](const CMatrix &m) { eig_sum += hermitian_eigenvalues(m).sum(); };
  for (const auto &m : f.sol.w_p) add(m);
  for (const auto &m : f.sol.sigma_p) add(m);
  for (const auto &m : f.sol.w_s) add(m);
  add(f.sol.sigma_s);
  CHECK(total_power(f.sol) == doctest::Approx(eig_sum).epsilon(1e-12));
}

TEST_CASE("total power is additive") {
  NetworkTopology t = topo_small();
  FactoredSolution a = random_factored(t, 71, 0.5);
  const FactoredSolution b = random_factored(t, 72, 0.3);
  const double pa = total_power(a.sol), pb = total_power(b.sol);
  a.sol += b.sol;
  CHECK(total_power(a.sol) == doctest::Approx(pa + pb).epsilon(1e-12));
}

TEST_CASE("secrecy rates are invariant under channel phase rotation") {
  NetworkTopology t = topo_small();
  ChannelSet ch = generate_channels(81, t, {}, noise_all(1e-3));
  const FactoredSolution f = random_factored(t, 82, 0.4);
  const PowerTerms pt = power_terms(ch, f.sol);
  const double r_pu = pu_secrecy_rate(ch, pt, f.sol, 0, 0);
  const double r_su = su_secrecy_rate(ch, pt, f.sol, 0);
  ChannelSet rot = ch;
  const cplx phase = std::polar(1.0, 1.234);
  rot.h_p[0][0] *= phase;
  rot.g_emk[0][0] *= std::polar(1.0, -0.77);
  rot.h_s[0] *= std::polar(1.0, 2.5);
  rot.g_el[0] *= std::polar(1.0, 0.3);
  const PowerTerms pt2 = power_terms(rot, f.sol);
  CHECK(pu_secrecy_rate(rot, pt2, f.sol, 0, 0) == doctest::Approx(r_pu).epsilon(1e-12));
  CHECK(su_secrecy_rate(rot, pt2, f.sol, 0) == doctest::Approx(r_su).epsilon(1e-12));
}

TEST_CASE("interference ordering: later decoding stages see no more power") {
  NetworkTopology t = topo_small();
  t.sus = 4;
  const ChannelSet ch = generate_channels(91, t, {}, noise_all(1e-3));
  const FactoredSolution f = random_factored(t, 92, 0.4);
  const PowerTerms pt = power_terms(ch, f.sol);
  for (int z = 0; z < t.sus; ++z)
    for (int j = 0; j + 1 < t.sus; ++j)
      CHECK(pt.lambda_s[j][z] >= pt.lambda_s[j + 1][z] - 1e-15);
}

TEST_CASE("feasibility report: zero solution and interference monotonicity") {
  NetworkTopology t = topo_small();
  const ChannelSet ch = generate_channels(101, t, {}, noise_all(1e-3));
  EhCircuitParams eh;
  const QosRequirements reqs =
      QosRequirements::uniform(t, 1.0, 0.5, mw_to_watts(10), mw_to_watts(15), mw_to_watts(5));
  const CovarianceSolution z = CovarianceSolution::zero(t);
  const FeasibilityReport rep = verify_feasibility(ch, z, reqs, eh);
  CHECK(!rep.c1);
  CHECK(!rep.c2);
  CHECK(rep.c3);
  CHECK(!rep.c4);
  CHECK(!rep.c5);
  CHECK(!rep.all_satisfied());

  // growing AN power shrinks the interference margin monotonically
  double prev = std::numeric_limits<double>::infinity();
  for (double scale : {0.1, 1.0, 10.0}) {
    CovarianceSolution s = CovarianceSolution::zero(t);
    s.sigma_s = scale * mw_to_watts(1.0) * CMatrix::Identity(3, 3);
    const double margin = verify_feasibility(ch, s, reqs, eh).min_margin("C3");
    CHECK(margin < prev);
    prev = margin;
  }

  // flat record export
  const std::string csv = rep.to_csv();
  CHECK(csv.find("constraint,margin,satisfied") == 0);
  CHECK(csv.find("C3[m=0,i=0]") != std::string::npos);
}
