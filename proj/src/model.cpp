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

#include "secnoma/model.hpp"

#include <algorithm>
#include <numeric>

namespace secnoma {

void NetworkTopology::validate() const {
  if (clusters < 1) throw validation_error("topology: clusters must be >= 1");
  if (static_cast<int>(pus_per_cluster.size()) != clusters)
    throw validation_error("topology: pus_per_cluster must have one entry per cluster");
  if (static_cast<int>(ehrs_per_cluster.size()) != clusters)
    throw validation_error("topology: ehrs_per_cluster must have one entry per cluster");
  for (int n : pus_per_cluster)
    if (n < 1) throw validation_error("topology: each cluster needs at least one PU");
  for (int n : ehrs_per_cluster)
    if (n < 0) throw validation_error("topology: negative EHR count");
  if (sus < 1) throw validation_error("topology: at least one SU required");
  if (secondary_ehrs < 0) throw validation_error("topology: negative secondary EHR count");
  if (pbs_antennas < 1 || cbs_antennas < 1)
    throw validation_error("topology: antenna counts must be >= 1");
}

int NetworkTopology::total_pus() const {
  return std::accumulate(pus_per_cluster.begin(), pus_per_cluster.end(), 0);
}

int NetworkTopology::total_primary_ehrs() const {
  return std::accumulate(ehrs_per_cluster.begin(), ehrs_per_cluster.end(), 0);
}

void LinkVariances::validate() const {
  for (double v : {pbs_pu, cbs_pu, pbs_su, cbs_su, pbs_pehr, cbs_pehr, pbs_sehr, cbs_sehr})
    if (!(v > 0.0)) throw validation_error("link variances must be positive");
}

void NoiseFloors::validate() const {
  for (double v : {pu, su, primary_ehr, secondary_ehr})
    if (!(v > 0.0)) throw validation_error("noise variances must be positive");
}

void EhCircuitParams::validate() const {
  if (!(a > 0.0) || !(b > 0.0) || !(p_max > 0.0))
    throw validation_error("EH circuit parameters must be positive");
}

QosRequirements QosRequirements::uniform(const NetworkTopology &topo, double gamma_p_all,
                                         double gamma_s_all, double upsilon_all, double zeta1,
                                         double zeta2) {
  QosRequirements q;
  q.gamma_p.resize(topo.clusters);
  q.upsilon.resize(topo.clusters);
  for (int m = 0; m < topo.clusters; ++m) {
    q.gamma_p[m].assign(topo.pus_per_cluster[m], gamma_p_all);
    q.upsilon[m].assign(topo.pus_per_cluster[m], upsilon_all);
  }
  q.gamma_s.assign(topo.sus, gamma_s_all);
  q.zeta_primary = zeta1;
  q.zeta_secondary = zeta2;
  return q;
}

void QosRequirements::validate(const NetworkTopology &topo, const EhCircuitParams &eh) const {
  if (static_cast<int>(gamma_p.size()) != topo.clusters ||
      static_cast<int>(upsilon.size()) != topo.clusters)
    throw validation_error("qos: per-cluster lists must match cluster count");
  for (int m = 0; m < topo.clusters; ++m) {
    if (static_cast<int>(gamma_p[m].size()) != topo.pus_per_cluster[m] ||
        static_cast<int>(upsilon[m].size()) != topo.pus_per_cluster[m])
      throw validation_error("qos: per-PU lists must match PU counts");
    for (double g : gamma_p[m])
      if (g < 0.0) throw validation_error("qos: secrecy rates must be >= 0");
    for (double u : upsilon[m])
      if (!(u > 0.0)) throw validation_error("qos: interference caps must be positive");
  }
  if (static_cast<int>(gamma_s.size()) != topo.sus)
    throw validation_error("qos: gamma_s must have one entry per SU");
  for (double g : gamma_s)
    if (g < 0.0) throw validation_error("qos: secrecy rates must be >= 0");
  if (!(zeta_primary > 0.0) || !(zeta_secondary > 0.0))
    throw validation_error("qos: harvesting targets must be positive");
  if (topo.total_primary_ehrs() > 0 && zeta_primary >= eh.p_max)
    throw validation_error("qos: zeta_primary at or above circuit saturation is unsatisfiable");
  if (topo.secondary_ehrs > 0 && zeta_secondary >= eh.p_max)
    throw validation_error("qos: zeta_secondary at or above circuit saturation is unsatisfiable");
}

ChannelSet generate_channels(std::uint64_t rng_seed, const NetworkTopology &topology,
                             const LinkVariances &variances, const NoiseFloors &noise) {
  topology.validate();
  variances.validate();
  noise.validate();

  Rng rng(rng_seed);
  ChannelSet ch;
  ch.topology = topology;
  const int npt = topology.pbs_antennas;
  const int nst = topology.cbs_antennas;

  ch.h_p.resize(topology.clusters);
  ch.f_s.resize(topology.clusters);
  ch.g_emk.resize(topology.clusters);
  ch.f_emk.resize(topology.clusters);
  ch.sigma2_p.resize(topology.clusters);
  ch.sigma2_e_pri.resize(topology.clusters);
  for (int m = 0; m < topology.clusters; ++m) {
    const int npu = topology.pus_per_cluster[m];
    const int nehr = topology.ehrs_per_cluster[m];
    for (int i = 0; i < npu; ++i) {
      ch.h_p[m].push_back(rng.cgauss_vector(npt, variances.pbs_pu));
      ch.f_s[m].push_back(rng.cgauss_vector(nst, variances.cbs_pu));
      ch.sigma2_p[m].push_back(noise.pu);
    }
    for (int k = 0; k < nehr; ++k) {
      ch.g_emk[m].push_back(rng.cgauss_vector(npt, variances.pbs_pehr));
      ch.f_emk[m].push_back(rng.cgauss_vector(nst, variances.cbs_pehr));
      ch.sigma2_e_pri[m].push_back(noise.primary_ehr);
    }
  }
  for (int j = 0; j < topology.sus; ++j) {
    ch.q_p.push_back(rng.cgauss_vector(npt, variances.pbs_su));
    ch.h_s.push_back(rng.cgauss_vector(nst, variances.cbs_su));
    ch.sigma2_s.push_back(noise.su);
  }
  for (int l = 0; l < topology.secondary_ehrs; ++l) {
    ch.q_el.push_back(rng.cgauss_vector(npt, variances.pbs_sehr));
    ch.g_el.push_back(rng.cgauss_vector(nst, variances.cbs_sehr));
    ch.sigma2_e_sec.push_back(noise.secondary_ehr);
  }

  // Relabel SUs so the CBS-side channel norms are nondecreasing; the decoding
  // order downstream relies on this.
  std::vector<int> order(topology.sus);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return ch.h_s[a].squaredNorm() < ch.h_s[b].squaredNorm(); });
  auto permute_c = [&](std::vector<CVector> &v) {
    std::vector<CVector> out(v.size());
    for (size_t j = 0; j < order.size(); ++j) out[j] = v[order[j]];
    v = std::move(out);
  };
  permute_c(ch.h_s);
  permute_c(ch.q_p);
  std::vector<double> s2(topology.sus);
  for (int j = 0; j < topology.sus; ++j) s2[j] = ch.sigma2_s[order[j]];
  ch.sigma2_s = std::move(s2);

  return ch;
}

OuterProducts outer_product_cache(const ChannelSet &ch) {
  OuterProducts o;
  auto op = [](const CVector &h) -> CMatrix { return h * h.adjoint(); };
  auto map2 = [&](const std::vector<std::vector<CVector>> &v) {
    std::vector<std::vector<CMatrix>> out(v.size());
    for (size_t m = 0; m < v.size(); ++m)
      for (const auto &h : v[m]) out[m].push_back(op(h));
    return out;
  };
  auto map1 = [&](const std::vector<CVector> &v) {
    std::vector<CMatrix> out;
    for (const auto &h : v) out.push_back(op(h));
    return out;
  };
  o.h_p = map2(ch.h_p);
  o.f_s = map2(ch.f_s);
  o.q_p = map1(ch.q_p);
  o.h_s = map1(ch.h_s);
  o.g_emk = map2(ch.g_emk);
  o.f_emk = map2(ch.f_emk);
  o.q_el = map1(ch.q_el);
  o.g_el = map1(ch.g_el);
  return o;
}

CovarianceSolution CovarianceSolution::zero(const NetworkTopology &topo) {
  CovarianceSolution s;
  s.w_p.assign(topo.clusters, CMatrix::Zero(topo.pbs_antennas, topo.pbs_antennas));
  s.sigma_p.assign(topo.clusters, CMatrix::Zero(topo.pbs_antennas, topo.pbs_antennas));
  s.w_s.assign(topo.sus, CMatrix::Zero(topo.cbs_antennas, topo.cbs_antennas));
  s.sigma_s = CMatrix::Zero(topo.cbs_antennas, topo.cbs_antennas);
  return s;
}

CMatrix CovarianceSolution::pbs_total() const {
  CMatrix t = CMatrix::Zero(w_p[0].rows(), w_p[0].cols());
  for (size_t m = 0; m < w_p.size(); ++m) t += w_p[m] + sigma_p[m];
  return t;
}

CMatrix CovarianceSolution::cbs_total() const { return cbs_tail(0); }

CMatrix CovarianceSolution::cbs_tail(int j0) const {
  CMatrix t = sigma_s;
  for (size_t j = j0; j < w_s.size(); ++j) t += w_s[j];
  return t;
}

CovarianceSolution &CovarianceSolution::operator+=(const CovarianceSolution &other) {
  for (size_t m = 0; m < w_p.size(); ++m) {
    w_p[m] += other.w_p[m];
    sigma_p[m] += other.sigma_p[m];
  }
  for (size_t j = 0; j < w_s.size(); ++j) w_s[j] += other.w_s[j];
  sigma_s += other.sigma_s;
  return *this;
}

CovarianceSolution CovarianceSolution::scaled(double factor) const {
  CovarianceSolution s = *this;
  for (auto &w : s.w_p) w *= factor;
  for (auto &w : s.sigma_p) w *= factor;
  for (auto &w : s.w_s) w *= factor;
  s.sigma_s *= factor;
  return s;
}

bool CovarianceSolution::is_psd(double tol_scale) const {
  auto ok = [&](const CMatrix &m) {
    const RVector ev = hermitian_eigenvalues(m);
    const double tr = std::max(m.trace().real(), 0.0);
    return ev(ev.size() - 1) >= -tol_scale * std::max(tr, 1e-300);
  };
  for (const auto &m : w_p)
    if (!ok(m)) return false;
  for (const auto &m : sigma_p)
    if (!ok(m)) return false;
  for (const auto &m : w_s)
    if (!ok(m)) return false;
  return ok(sigma_s);
}

}  // namespace secnoma
