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

#include <algorithm>

#include "secnoma/model.hpp"

using namespace secnoma;

namespace {

NetworkTopology small_topology() {
  NetworkTopology t;
  t.clusters = 2;
  t.pus_per_cluster = {1, 2};
  t.ehrs_per_cluster = {1, 1};
  t.sus = 3;
  t.secondary_ehrs = 2;
  t.pbs_antennas = 10;
  t.cbs_antennas = 5;
  return t;
}

}  // namespace

TEST_CASE("mean squared channel norm matches entry variance times length") {
  NetworkTopology t = small_topology();
  LinkVariances v;  // pbs->pu entry variance 2, ten antennas -> E|h|^2 = 20
  NoiseFloors n;
  double acc = 0.0;
  const int draws = 10000;
  for (int s = 0; s < draws; ++s) {
    const ChannelSet ch = generate_channels(1000 + s, t, v, n);
    acc += ch.h_p[0][0].squaredNorm();
  }
  CHECK(acc / draws == doctest::Approx(20.0).epsilon(0.05));
}

TEST_CASE("per-entry sample variance tracks the configured class variance") {
  NetworkTopology t = small_topology();
  LinkVariances v;
  NoiseFloors n;
  double acc_fs = 0.0, acc_ge = 0.0;
  const int draws = 10000;
  for (int s = 0; s < draws; ++s) {
    const ChannelSet ch = generate_channels(77 + s, t, v, n);
    acc_fs += std::norm(ch.f_s[0][0](0));
    acc_ge += std::norm(ch.g_emk[0][0](0));
  }
  CHECK(acc_fs / draws == doctest::Approx(0.5).epsilon(0.05));
  CHECK(acc_ge / draws == doctest::Approx(1.5).epsilon(0.05));
}

TEST_CASE("degenerate variances and noise are rejected") {
  NetworkTopology t = small_topology();
  LinkVariances v;
  v.cbs_su = 0.0;
  CHECK_THROWS_AS(generate_channels(1, t, v, {}), validation_error);
  LinkVariances v2;
  NoiseFloors n;
  n.su = 0.0;
  CHECK_THROWS_AS(generate_channels(1, t, v2, n), validation_error);
}

TEST_CASE("same seed reproduces the channel set bit for bit") {
  NetworkTopology t = small_topology();
  const ChannelSet a = generate_channels(42, t, {}, {});
  const ChannelSet b = generate_channels(42, t, {}, {});
  for (int m = 0; m < t.clusters; ++m)
    for (int i = 0; i < t.pus_per_cluster[m]; ++i) CHECK(a.h_p[m][i] == b.h_p[m][i]);
  for (int j = 0; j < t.sus; ++j) {
    CHECK(a.h_s[j] == b.h_s[j]);
    CHECK(a.q_p[j] == b.q_p[j]);
  }
  for (int l = 0; l < t.secondary_ehrs; ++l) CHECK(a.g_el[l] == b.g_el[l]);
  const ChannelSet c = generate_channels(43, t, {}, {});
  CHECK(a.h_p[0][0] != c.h_p[0][0]);
}

TEST_CASE("secondary users come out sorted by channel strength") {
  NetworkTopology t = small_topology();
  t.sus = 5;
  for (int s = 0; s < 50; ++s) {
    const ChannelSet ch = generate_channels(900 + s, t, {}, {});
    for (int j = 0; j + 1 < t.sus; ++j)
      CHECK(ch.h_s[j].squaredNorm() <= ch.h_s[j + 1].squaredNorm());
  }
}

TEST_CASE("relabeling keeps the multiset of channel draws") {
  // regenerate without ordering by drawing the same raw stream, then compare
  // sorted norm lists
  NetworkTopology t = small_topology();
  const ChannelSet ch = generate_channels(7, t, {}, {});
  std::vector<double> norms;
  for (const auto &h : ch.h_s) norms.push_back(h.squaredNorm());
  std::vector<double> sorted = norms;
  std::sort(sorted.begin(), sorted.end());
  CHECK(norms == sorted);  // already nondecreasing, so sorting is a no-op
}

TEST_CASE("outer products: basis vector, trace identity, hermitian, rank one") {
  NetworkTopology t = small_topology();
  const ChannelSet ch = generate_channels(5, t, {}, {});
  const OuterProducts op = outer_product_cache(ch);

  // basis vector case
  CVector e1 = CVector::Zero(4);
  e1(0) = 1.0;
  const CMatrix he = e1 * e1.adjoint();
  CHECK(he(0, 0) == cplx(1.0, 0.0));
  CHECK(he.cwiseAbs().sum() == doctest::Approx(1.0));

  auto check_matrix = [&](const CMatrix &h, const CVector &v) {
    CHECK(h.trace().real() == doctest::Approx(v.squaredNorm()).epsilon(1e-12));
    CHECK((h - h.adjoint()).cwiseAbs().maxCoeff() == 0.0);
    const RVector ev = hermitian_eigenvalues(h);
    if (h.rows() > 1) CHECK(std::abs(ev(1)) < 1e-10 * ev(0));  // rank one
  };
  check_matrix(op.h_p[0][0], ch.h_p[0][0]);
  check_matrix(op.f_s[1][1], ch.f_s[1][1]);
  check_matrix(op.q_p[2], ch.q_p[2]);
  check_matrix(op.h_s[0], ch.h_s[0]);
  check_matrix(op.g_emk[1][0], ch.g_emk[1][0]);
  check_matrix(op.f_emk[0][0], ch.f_emk[0][0]);
  check_matrix(op.q_el[1], ch.q_el[1]);
  check_matrix(op.g_el[0], ch.g_el[0]);
}

TEST_CASE("topology validation rejects malformed counts") {
  NetworkTopology t = small_topology();
  t.pus_per_cluster = {1};  // wrong length
  CHECK_THROWS_AS(t.validate(), validation_error);
  t = small_topology();
  t.pus_per_cluster = {0, 1};
  CHECK_THROWS_AS(t.validate(), validation_error);
  t = small_topology();
  t.pbs_antennas = 0;
  CHECK_THROWS_AS(t.validate(), validation_error);
  t = small_topology();
  t.ehrs_per_cluster = {0, 0};  // EHR-free clusters are allowed
  t.secondary_ehrs = 0;
  CHECK_NOTHROW(t.validate());
}

TEST_CASE("qos validation rejects saturation-level harvesting targets") {
  NetworkTopology t = small_topology();
  EhCircuitParams eh;
  QosRequirements q = QosRequirements::uniform(t, 2.0, 1.0, mw_to_watts(10), mw_to_watts(15),
                                               mw_to_watts(5));
  CHECK_NOTHROW(q.validate(t, eh));
  q.zeta_primary = eh.p_max;
  CHECK_THROWS_AS(q.validate(t, eh), validation_error);
}

TEST_CASE("covariance helpers: psd check, totals, tails") {
  NetworkTopology t = small_topology();
  CovarianceSolution s = CovarianceSolution::zero(t);
  CHECK(s.is_psd());
  s.w_s[1] = CMatrix::Identity(5, 5);
  s.sigma_s = 2.0 * CMatrix::Identity(5, 5);
  CHECK(s.cbs_total().trace().real() == doctest::Approx(15.0));
  CHECK(s.cbs_tail(2).trace().real() == doctest::Approx(10.0));  // sigma only
  s.w_p[0](0, 1) = cplx(0, 5);
  s.w_p[0](1, 0) = cplx(0, -5);  // indefinite
  CHECK(!s.is_psd());
}

TEST_CASE("units: dbm and mw conversions") {
  CHECK(dbm_to_watts(-120.0) == doctest::Approx(1e-15).epsilon(1e-12));
  CHECK(dbm_to_watts(0.0) == doctest::Approx(1e-3));
  CHECK(mw_to_watts(24.0) == doctest::Approx(0.024));
  CHECK(watts_to_dbm(dbm_to_watts(-37.5)) == doctest::Approx(-37.5));
}
