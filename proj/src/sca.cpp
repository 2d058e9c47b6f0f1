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

#include "secnoma/sca.hpp"

#include <cmath>

namespace secnoma {

namespace {

constexpr double kLn2 = 0.6931471805599453;

void check_finite(const std::vector<double> &v, bool &ok) {
  for (double x : v) ok = ok && std::isfinite(x);
}

}  // namespace

bool ScaIterate::all_finite() const {
  bool ok = true;
  for (const auto &v : pu_log_interf) check_finite(v, ok);
  for (const auto &v : pu_log_total) check_finite(v, ok);
  check_finite(pu_cap, ok);
  check_finite(pu_log_cap_hi, ok);
  check_finite(pu_log_cap_lo, ok);
  for (const auto &v : pu_eav_log_total) check_finite(v, ok);
  for (const auto &v : pu_eav_log_interf) check_finite(v, ok);
  ok = ok && std::isfinite(su_log_interf) && std::isfinite(su_log_total) &&
       std::isfinite(su_cap) && std::isfinite(su_log_cap_hi) && std::isfinite(su_log_cap_lo);
  check_finite(su_eav_log_total, ok);
  check_finite(su_eav_log_interf, ok);
  check_finite(sic_sinr_floor, ok);
  check_finite(sic_eav_cap, ok);
  check_finite(sic_log_sinr_floor, ok);
  check_finite(sic_log_eav_cap, ok);
  for (const auto &v : sic_log_interf) check_finite(v, ok);
  for (const auto &v : sic_log_total) check_finite(v, ok);
  for (const auto &v : sic_eav_log_total) check_finite(v, ok);
  for (const auto &v : sic_eav_log_interf) check_finite(v, ok);
  return ok;
}

ScaIterate compute_iterate_at(const ChannelSet &ch, const CovarianceSolution &sol) {
  const auto &topo = ch.topology;
  const PowerTerms t = power_terms(ch, sol);
  ScaIterate it;
  it.anchor = sol;

  it.pu_log_interf.resize(topo.clusters);
  it.pu_log_total.resize(topo.clusters);
  it.pu_eav_log_total.resize(topo.clusters);
  it.pu_eav_log_interf.resize(topo.clusters);
  for (int m = 0; m < topo.clusters; ++m) {
    for (int i = 0; i < topo.pus_per_cluster[m]; ++i) {
      const double u = ch.sigma2_p[m][i];
      const double own = quad_form(sol.w_p[m], ch.h_p[m][i]);
      it.pu_log_interf[m].push_back(std::log((t.gamma_p[m][i] - own) / u));
      it.pu_log_total[m].push_back(std::log(t.gamma_p[m][i] / u));
    }
    double cap = 1.0;
    for (int k = 0; k < topo.ehrs_per_cluster[m]; ++k) {
      const double ue = ch.sigma2_e_pri[m][k];
      const double num = t.gamma_e[m][k] + ue;
      const double den = num - quad_form(sol.w_p[m], ch.g_emk[m][k]);
      cap = std::max(cap, num / den);
      it.pu_eav_log_total[m].push_back(std::log(num / ue));
      it.pu_eav_log_interf[m].push_back(std::log(den / ue));
    }
    it.pu_cap.push_back(cap);
    it.pu_log_cap_hi.push_back(std::log(cap));
    it.pu_log_cap_lo.push_back(std::log(cap));
  }

  const int top = topo.sus - 1;
  {
    const double u = ch.sigma2_s[top];
    const double own = quad_form(sol.w_s[top], ch.h_s[top]);
    it.su_log_interf = std::log((t.gamma_s[top] - own) / u);
    it.su_log_total = std::log(t.gamma_s[top] / u);
    double cap = 1.0;
    for (int l = 0; l < topo.secondary_ehrs; ++l) {
      const double ue = ch.sigma2_e_sec[l];
      const double num = t.lambda_e[l][top];
      const double den = num - quad_form(sol.w_s[top], ch.g_el[l]);
      cap = std::max(cap, num / den);
      it.su_eav_log_total.push_back(std::log(num / ue));
      it.su_eav_log_interf.push_back(std::log(den / ue));
    }
    it.su_cap = cap;
    it.su_log_cap_hi = std::log(cap);
    it.su_log_cap_lo = std::log(cap);
  }

  it.sic_log_interf.resize(std::max(0, topo.sus - 1));
  it.sic_log_total.resize(std::max(0, topo.sus - 1));
  it.sic_eav_log_total.resize(topo.secondary_ehrs);
  it.sic_eav_log_interf.resize(topo.secondary_ehrs);
  for (int j = 0; j + 1 < topo.sus; ++j) {
    double floor_ratio = std::numeric_limits<double>::infinity();
    for (int z = j; z < topo.sus; ++z) {
      const double uz = ch.sigma2_s[z];
      const double total = t.lambda_s[j][z];
      const double interf = total - quad_form(sol.w_s[j], ch.h_s[z]);
      floor_ratio = std::min(floor_ratio, total / interf);
      it.sic_log_interf[j].push_back(std::log(interf / uz));
      it.sic_log_total[j].push_back(std::log(total / uz));
    }
    it.sic_sinr_floor.push_back(floor_ratio);
    it.sic_log_sinr_floor.push_back(std::log(floor_ratio));
    double cap = 1.0;
    for (int l = 0; l < topo.secondary_ehrs; ++l) {
      const double ue = ch.sigma2_e_sec[l];
      const double num = t.lambda_sl[l][j];
      const double den = num - quad_form(sol.w_s[j], ch.g_el[l]);
      cap = std::max(cap, num / den);
      it.sic_eav_log_total[l].push_back(std::log(num / ue));
      it.sic_eav_log_interf[l].push_back(std::log(den / ue));
    }
    it.sic_eav_cap.push_back(cap);
    it.sic_log_eav_cap.push_back(std::log(cap));
  }
  return it;
}

ScaIterate initialize_iterate(const ChannelSet &ch, const QosRequirements &reqs,
                              const EhCircuitParams &eh, std::uint64_t rng_seed, int restart) {
  const auto &topo = ch.topology;
  reqs.validate(topo, eh);

  // per-matrix unit-trace shapes; restarts bend the isotropic shape with a
  // seeded rank-one bump
  Rng rng(seed_combine(seed_combine(rng_seed, 0x5eed1417ULL), static_cast<std::uint64_t>(restart)));
  auto shape = [&](int n) -> CMatrix {
    CMatrix d = CMatrix::Identity(n, n);
    if (restart > 0) {
      const CVector u = rng.cgauss_vector(n, 1.0);
      d += u * u.adjoint();
    }
    return d / d.trace().real();
  };
  std::vector<CMatrix> dw_p, ds_p, dw_s;
  for (int m = 0; m < topo.clusters; ++m) {
    dw_p.push_back(shape(topo.pbs_antennas));
    ds_p.push_back(shape(topo.pbs_antennas));
  }
  for (int j = 0; j < topo.sus; ++j) dw_s.push_back(shape(topo.cbs_antennas));
  const CMatrix ds_s = shape(topo.cbs_antennas);

  const bool any_pri = topo.total_primary_ehrs() > 0;
  const bool any_sec = topo.secondary_ehrs > 0;
  const double thr1 = any_pri ? eh_rf_threshold(reqs.zeta_primary, eh) : 0.0;
  const double thr2 = any_sec ? eh_rf_threshold(reqs.zeta_secondary, eh) : 0.0;

  double p = 1e-3;
  for (int step = 0; step < 64; ++step, p *= 2.0) {
    CovarianceSolution sol;
    for (int m = 0; m < topo.clusters; ++m) {
      sol.w_p.push_back(p * dw_p[m]);
      sol.sigma_p.push_back(p * ds_p[m]);
    }
    for (int j = 0; j < topo.sus; ++j) sol.w_s.push_back(p * dw_s[j]);
    sol.sigma_s = p * ds_s;

    const CMatrix cbs = sol.cbs_total();
    bool c3_ok = true;
    for (int m = 0; m < topo.clusters && c3_ok; ++m)
      for (int i = 0; i < topo.pus_per_cluster[m] && c3_ok; ++i)
        c3_ok = quad_form(cbs, ch.f_s[m][i]) <= reqs.upsilon[m][i];
    bool eh_ok = true;
    for (int m = 0; m < topo.clusters && eh_ok; ++m)
      for (int k = 0; k < topo.ehrs_per_cluster[m] && eh_ok; ++k)
        eh_ok = primary_ehr_rf_power(ch, sol, m, k) >= thr1;
    for (int l = 0; l < topo.secondary_ehrs && eh_ok; ++l)
      eh_ok = secondary_ehr_rf_power(ch, sol, l) >= thr2;

    if (c3_ok && eh_ok) return compute_iterate_at(ch, sol);
    if (!c3_ok)
      throw init_infeasible_error(
          "initialization infeasible: interference cap binds before harvesting thresholds");
  }
  throw init_infeasible_error("initialization infeasible: doubling search exhausted");
}

namespace {

struct Alloc {
  int next = 0;
  int operator()() { return next++; }
};

}  // namespace

ConvexSubproblem build_subproblem(const ChannelSet &ch, const QosRequirements &reqs,
                                  const EhCircuitParams &eh, const ScaIterate &it,
                                  const BuildOptions &opts) {
  if (!it.all_finite()) throw validation_error("build_subproblem: non-finite linearization point");
  const auto &topo = ch.topology;
  const OuterProducts op = outer_product_cache(ch);
  const int npt = topo.pbs_antennas, nst = topo.cbs_antennas;
  const int psz = npt * npt, ssz = nst * nst;
  const int top = topo.sus - 1;

  VarMap map;
  map.npt = npt;
  map.nst = nst;
  map.clusters = topo.clusters;
  map.sus = topo.sus;
  map.with_an = opts.with_an;

  int pos = 0;
  for (int m = 0; m < topo.clusters; ++m) {
    map.wp_off.push_back(pos);
    pos += psz;
  }
  for (int m = 0; m < topo.clusters; ++m) {
    map.sp_off.push_back(pos);
    pos += psz;
  }
  for (int j = 0; j < topo.sus; ++j) {
    map.ws_off.push_back(pos);
    pos += ssz;
  }
  if (opts.with_an) {
    map.ss_off = pos;
    pos += ssz;
  }

  Alloc alloc{pos};
  map.pu_log_interf.resize(topo.clusters);
  map.pu_log_total.resize(topo.clusters);
  map.pu_eav_log_total.resize(topo.clusters);
  map.pu_eav_log_interf.resize(topo.clusters);
  for (int m = 0; m < topo.clusters; ++m) {
    const bool eav = topo.ehrs_per_cluster[m] > 0;
    for (int i = 0; i < topo.pus_per_cluster[m]; ++i) {
      map.pu_log_interf[m].push_back(alloc());
      map.pu_log_total[m].push_back(alloc());
    }
    map.pu_cap.push_back(eav ? alloc() : -1);
    map.pu_log_cap_hi.push_back(eav ? alloc() : -1);
    map.pu_log_cap_lo.push_back(eav ? alloc() : -1);
    for (int k = 0; k < topo.ehrs_per_cluster[m]; ++k) {
      map.pu_eav_log_total[m].push_back(alloc());
      map.pu_eav_log_interf[m].push_back(alloc());
    }
  }
  const bool sec_eav = topo.secondary_ehrs > 0;
  map.su_log_interf = alloc();
  map.su_log_total = alloc();
  if (sec_eav) {
    map.su_cap = alloc();
    map.su_log_cap_hi = alloc();
    map.su_log_cap_lo = alloc();
    for (int l = 0; l < topo.secondary_ehrs; ++l) {
      map.su_eav_log_total.push_back(alloc());
      map.su_eav_log_interf.push_back(alloc());
    }
  }
  map.sic_log_interf.resize(std::max(0, topo.sus - 1));
  map.sic_log_total.resize(std::max(0, topo.sus - 1));
  map.sic_eav_log_total.resize(topo.secondary_ehrs);
  map.sic_eav_log_interf.resize(topo.secondary_ehrs);
  for (int j = 0; j + 1 < topo.sus; ++j) {
    map.sic_sinr_floor.push_back(alloc());
    map.sic_log_sinr_floor.push_back(alloc());
    if (sec_eav) {
      map.sic_eav_cap.push_back(alloc());
      map.sic_log_eav_cap.push_back(alloc());
    } else {
      map.sic_eav_cap.push_back(-1);
      map.sic_log_eav_cap.push_back(-1);
    }
    for (int z = j; z < topo.sus; ++z) {
      map.sic_log_interf[j].push_back(alloc());
      map.sic_log_total[j].push_back(alloc());
    }
    for (int l = 0; l < topo.secondary_ehrs; ++l) {
      map.sic_eav_log_total[l].push_back(alloc());
      map.sic_eav_log_interf[l].push_back(alloc());
    }
  }
  map.nvars = alloc.next;

  ConvexSubproblem out{ConicProgram(map.nvars), map};
  ConicProgram &prog = out.program;

  auto add_block_cost = [&](int off, int dim, const std::string &tag) {
    prog.add_block(off, dim, tag);
    for (int j = 0; j < dim; ++j) prog.cost()(off + (j + 1) * (j + 1) - 1) = 1.0;
  };
  for (int m = 0; m < topo.clusters; ++m)
    add_block_cost(map.wp_off[m], npt, "W_p[" + std::to_string(m) + "]");
  for (int m = 0; m < topo.clusters; ++m)
    add_block_cost(map.sp_off[m], npt, "Sigma_p[" + std::to_string(m) + "]");
  for (int j = 0; j < topo.sus; ++j)
    add_block_cost(map.ws_off[j], nst, "W_s[" + std::to_string(j) + "]");
  if (opts.with_an) add_block_cost(map.ss_off, nst, "Sigma_s");

  auto add_tr = [&](RVector &a, int off, const CMatrix &h, double s) {
    RVector p = pack_hermitian(h);
    a.segment(off, p.size()) += s * p;
  };
  // every PBS covariance against h, optionally skipping one information beam
  auto pbs_all = [&](RVector &a, const CMatrix &h, double s, int skip_wp = -1) {
    for (int m = 0; m < topo.clusters; ++m) {
      if (m != skip_wp) add_tr(a, map.wp_off[m], h, s);
      add_tr(a, map.sp_off[m], h, s);
    }
  };
  auto cbs_all = [&](RVector &a, const CMatrix &h, double s) {
    for (int j = 0; j < topo.sus; ++j) add_tr(a, map.ws_off[j], h, s);
    if (opts.with_an) add_tr(a, map.ss_off, h, s);
  };
  auto an_s = [&](RVector &a, const CMatrix &h, double s) {
    if (opts.with_an) add_tr(a, map.ss_off, h, s);
  };
  auto zero = [&]() { return RVector::Zero(map.nvars).eval(); };
  auto sub = [](int m) { return "[" + std::to_string(m) + "]"; };
  auto sub2 = [](int a, int b) {
    return "[" + std::to_string(a) + "," + std::to_string(b) + "]";
  };

  // --- PU secrecy groups -----------------------------------------------------
  for (int m = 0; m < topo.clusters; ++m) {
    const bool eav = topo.ehrs_per_cluster[m] > 0;
    for (int i = 0; i < topo.pus_per_cluster[m]; ++i) {
      const double u = ch.sigma2_p[m][i];
      const double at = it.pu_log_interf[m][i];
      {
        RVector a = zero();
        a(map.pu_log_interf[m][i]) = 1.0;
        if (eav) a(map.pu_log_cap_hi[m]) = 1.0;
        a(map.pu_log_total[m][i]) = -1.0;
        prog.add_affine(std::move(a), -reqs.gamma_p[m][i] * kLn2, "pu-rate-budget" + sub2(m, i));
      }
      {
        RVector a = zero();
        pbs_all(a, op.h_p[m][i], 1.0 / u, m);
        cbs_all(a, op.f_s[m][i], 1.0 / u);
        a(map.pu_log_interf[m][i]) = -std::exp(at);
        prog.add_affine(std::move(a), std::exp(at) * (1.0 - at) - 1.0,
                        "pu-interference-ub" + sub2(m, i));
      }
      {
        RVector uvec = zero(), vvec = zero();
        pbs_all(uvec, op.h_p[m][i], 1.0 / u);
        cbs_all(uvec, op.f_s[m][i], 1.0 / u);
        vvec(map.pu_log_total[m][i]) = 1.0;
        prog.add_exp(std::move(uvec), 1.0, std::move(vvec), 0.0, "pu-signal-lb" + sub2(m, i));
      }
    }
    if (eav) {
      const double bt = it.pu_log_cap_hi[m];
      {
        RVector a = zero();
        a(map.pu_cap[m]) = 1.0;
        a(map.pu_log_cap_hi[m]) = -std::exp(bt);
        prog.add_affine(std::move(a), std::exp(bt) * (1.0 - bt), "pu-tau-ub" + sub(m));
      }
      {
        RVector uvec = zero(), vvec = zero();
        uvec(map.pu_cap[m]) = 1.0;
        vvec(map.pu_log_cap_lo[m]) = 1.0;
        prog.add_exp(std::move(uvec), 0.0, std::move(vvec), 0.0, "pu-tau-lb" + sub(m));
      }
      for (int k = 0; k < topo.ehrs_per_cluster[m]; ++k) {
        const double ue = ch.sigma2_e_pri[m][k];
        const double mt = it.pu_eav_log_total[m][k];
        {
          RVector a = zero();
          a(map.pu_eav_log_total[m][k]) = 1.0;
          a(map.pu_eav_log_interf[m][k]) = -1.0;
          a(map.pu_log_cap_lo[m]) = -1.0;
          prog.add_affine(std::move(a), 0.0, "pu-eav-budget" + sub2(m, k));
        }
        {
          RVector a = zero();
          pbs_all(a, op.g_emk[m][k], 1.0 / ue);
          cbs_all(a, op.f_emk[m][k], 1.0 / ue);
          a(map.pu_eav_log_total[m][k]) = -std::exp(mt);
          prog.add_affine(std::move(a), std::exp(mt) * (1.0 - mt) - 1.0,
                          "pu-eav-num-ub" + sub2(m, k));
        }
        {
          RVector uvec = zero(), vvec = zero();
          pbs_all(uvec, op.g_emk[m][k], 1.0 / ue, m);
          cbs_all(uvec, op.f_emk[m][k], 1.0 / ue);
          vvec(map.pu_eav_log_interf[m][k]) = 1.0;
          prog.add_exp(std::move(uvec), 1.0, std::move(vvec), 0.0, "pu-eav-den-lb" + sub2(m, k));
        }
      }
    }
  }

  // --- strongest SU ------------------------------------------------------------
  {
    const double u = ch.sigma2_s[top];
    const double at = it.su_log_interf;
    {
      RVector a = zero();
      a(map.su_log_interf) = 1.0;
      if (sec_eav) a(map.su_log_cap_hi) = 1.0;
      a(map.su_log_total) = -1.0;
      prog.add_affine(std::move(a), -reqs.gamma_s[top] * kLn2, "su-rate-budget" + sub(top));
    }
    {
      RVector a = zero();
      pbs_all(a, op.q_p[top], 1.0 / u);
      an_s(a, op.h_s[top], 1.0 / u);
      a(map.su_log_interf) = -std::exp(at);
      prog.add_affine(std::move(a), std::exp(at) * (1.0 - at) - 1.0,
                      "su-interference-ub" + sub(top));
    }
    {
      RVector uvec = zero(), vvec = zero();
      pbs_all(uvec, op.q_p[top], 1.0 / u);
      add_tr(uvec, map.ws_off[top], op.h_s[top], 1.0 / u);
      an_s(uvec, op.h_s[top], 1.0 / u);
      vvec(map.su_log_total) = 1.0;
      prog.add_exp(std::move(uvec), 1.0, std::move(vvec), 0.0, "su-signal-lb" + sub(top));
    }
    if (sec_eav) {
      const double bt = it.su_log_cap_hi;
      {
        RVector a = zero();
        a(map.su_cap) = 1.0;
        a(map.su_log_cap_hi) = -std::exp(bt);
        prog.add_affine(std::move(a), std::exp(bt) * (1.0 - bt), "su-tau-ub" + sub(top));
      }
      {
        RVector uvec = zero(), vvec = zero();
        uvec(map.su_cap) = 1.0;
        vvec(map.su_log_cap_lo) = 1.0;
        prog.add_exp(std::move(uvec), 0.0, std::move(vvec), 0.0, "su-tau-lb" + sub(top));
      }
      for (int l = 0; l < topo.secondary_ehrs; ++l) {
        const double ue = ch.sigma2_e_sec[l];
        const double mt = it.su_eav_log_total[l];
        {
          RVector a = zero();
          a(map.su_eav_log_total[l]) = 1.0;
          a(map.su_eav_log_interf[l]) = -1.0;
          a(map.su_log_cap_lo) = -1.0;
          prog.add_affine(std::move(a), 0.0, "su-eav-budget" + sub(l));
        }
        {
          RVector a = zero();
          pbs_all(a, op.q_el[l], 1.0 / ue);
          add_tr(a, map.ws_off[top], op.g_el[l], 1.0 / ue);
          an_s(a, op.g_el[l], 1.0 / ue);
          a(map.su_eav_log_total[l]) = -std::exp(mt);
          prog.add_affine(std::move(a), std::exp(mt) * (1.0 - mt) - 1.0, "su-eav-num-ub" + sub(l));
        }
        {
          RVector uvec = zero(), vvec = zero();
          pbs_all(uvec, op.q_el[l], 1.0 / ue);
          an_s(uvec, op.g_el[l], 1.0 / ue);
          vvec(map.su_eav_log_interf[l]) = 1.0;
          prog.add_exp(std::move(uvec), 1.0, std::move(vvec), 0.0, "su-eav-den-lb" + sub(l));
        }
      }
    }
  }

  // --- weaker SUs: decodability at every later user + worst-case leak ----------
  for (int j = 0; j + 1 < topo.sus; ++j) {
    {
      RVector a = zero();
      a(map.sic_sinr_floor[j]) = -1.0;
      double rhs = -std::exp2(reqs.gamma_s[j]);
      if (sec_eav) {
        a(map.sic_eav_cap[j]) = std::exp2(reqs.gamma_s[j]);
        rhs = 0.0;
      }
      prog.add_affine(std::move(a), rhs, "su-noma-rate" + sub(j));
    }
    {
      const double xt = it.sic_log_sinr_floor[j];
      RVector a = zero();
      a(map.sic_sinr_floor[j]) = 1.0;
      a(map.sic_log_sinr_floor[j]) = -std::exp(xt);
      prog.add_affine(std::move(a), std::exp(xt) * (1.0 - xt), "su-kappa-ub" + sub(j));
    }
    for (int z = j; z < topo.sus; ++z) {
      const double uz = ch.sigma2_s[z];
      const int zi = z - j;
      const double at = it.sic_log_interf[j][zi];
      {
        RVector a = zero();
        a(map.sic_log_interf[j][zi]) = 1.0;
        a(map.sic_log_sinr_floor[j]) = 1.0;
        a(map.sic_log_total[j][zi]) = -1.0;
        prog.add_affine(std::move(a), 0.0, "su-sic-budget" + sub2(j, z));
      }
      {
        RVector a = zero();
        pbs_all(a, op.q_p[z], 1.0 / uz);
        for (int v = j + 1; v < topo.sus; ++v) add_tr(a, map.ws_off[v], op.h_s[z], 1.0 / uz);
        an_s(a, op.h_s[z], 1.0 / uz);
        a(map.sic_log_interf[j][zi]) = -std::exp(at);
        prog.add_affine(std::move(a), std::exp(at) * (1.0 - at) - 1.0,
                        "su-sic-interf-ub" + sub2(j, z));
      }
      {
        RVector uvec = zero(), vvec = zero();
        pbs_all(uvec, op.q_p[z], 1.0 / uz);
        for (int v = j; v < topo.sus; ++v) add_tr(uvec, map.ws_off[v], op.h_s[z], 1.0 / uz);
        an_s(uvec, op.h_s[z], 1.0 / uz);
        vvec(map.sic_log_total[j][zi]) = 1.0;
        prog.add_exp(std::move(uvec), 1.0, std::move(vvec), 0.0, "su-sic-signal-lb" + sub2(j, z));
      }
    }
    if (sec_eav) {
      for (int l = 0; l < topo.secondary_ehrs; ++l) {
        const double ue = ch.sigma2_e_sec[l];
        const double mt = it.sic_eav_log_total[l][j];
        {
          RVector a = zero();
          a(map.sic_eav_log_total[l][j]) = 1.0;
          a(map.sic_eav_log_interf[l][j]) = -1.0;
          a(map.sic_log_eav_cap[j]) = -1.0;
          prog.add_affine(std::move(a), 0.0, "su-noma-eav-budget" + sub2(l, j));
        }
        {
          RVector a = zero();
          pbs_all(a, op.q_el[l], 1.0 / ue);
          for (int v = j; v < topo.sus; ++v) add_tr(a, map.ws_off[v], op.g_el[l], 1.0 / ue);
          an_s(a, op.g_el[l], 1.0 / ue);
          a(map.sic_eav_log_total[l][j]) = -std::exp(mt);
          prog.add_affine(std::move(a), std::exp(mt) * (1.0 - mt) - 1.0,
                          "su-noma-eav-num-ub" + sub2(l, j));
        }
        {
          RVector uvec = zero(), vvec = zero();
          pbs_all(uvec, op.q_el[l], 1.0 / ue);
          for (int v = j + 1; v < topo.sus; ++v) add_tr(uvec, map.ws_off[v], op.g_el[l], 1.0 / ue);
          an_s(uvec, op.g_el[l], 1.0 / ue);
          vvec(map.sic_eav_log_interf[l][j]) = 1.0;
          prog.add_exp(std::move(uvec), 1.0, std::move(vvec), 0.0,
                       "su-noma-eav-den-lb" + sub2(l, j));
        }
      }
      {
        RVector uvec = zero(), vvec = zero();
        uvec(map.sic_eav_cap[j]) = 1.0;
        vvec(map.sic_log_eav_cap[j]) = 1.0;
        prog.add_exp(std::move(uvec), 0.0, std::move(vvec), 0.0, "su-omega-lb" + sub(j));
      }
    }
  }

  // --- interference cap and harvesting floors ---------------------------------
  for (int m = 0; m < topo.clusters; ++m)
    for (int i = 0; i < topo.pus_per_cluster[m]; ++i) {
      RVector a = zero();
      cbs_all(a, op.f_s[m][i], 1.0);
      prog.add_affine(std::move(a), reqs.upsilon[m][i], "cbs-interference-cap" + sub2(m, i));
    }
  if (topo.total_primary_ehrs() > 0) {
    const double thr1 = eh_rf_threshold(reqs.zeta_primary, eh);
    for (int m = 0; m < topo.clusters; ++m)
      for (int k = 0; k < topo.ehrs_per_cluster[m]; ++k) {
        RVector a = zero();
        pbs_all(a, op.g_emk[m][k], -1.0);
        cbs_all(a, op.f_emk[m][k], -1.0);
        prog.add_affine(std::move(a), -thr1, "eh-primary-floor" + sub2(m, k));
      }
  }
  if (topo.secondary_ehrs > 0) {
    const double thr2 = eh_rf_threshold(reqs.zeta_secondary, eh);
    for (int l = 0; l < topo.secondary_ehrs; ++l) {
      RVector a = zero();
      pbs_all(a, op.q_el[l], -1.0);
      cbs_all(a, op.g_el[l], -1.0);
      prog.add_affine(std::move(a), -thr2, "eh-secondary-floor" + sub(l));
    }
  }

  out.start = out.map.encode(it);
  return out;
}

RVector VarMap::encode(const ScaIterate &it) const {
  RVector x = RVector::Zero(nvars);
  for (int m = 0; m < clusters; ++m) {
    pack_hermitian_into(it.anchor.w_p[m], x.data() + wp_off[m]);
    pack_hermitian_into(it.anchor.sigma_p[m], x.data() + sp_off[m]);
  }
  for (int j = 0; j < sus; ++j) pack_hermitian_into(it.anchor.w_s[j], x.data() + ws_off[j]);
  if (with_an) pack_hermitian_into(it.anchor.sigma_s, x.data() + ss_off);

  for (int m = 0; m < clusters; ++m) {
    for (size_t i = 0; i < pu_log_interf[m].size(); ++i) {
      x(pu_log_interf[m][i]) = it.pu_log_interf[m][i];
      x(pu_log_total[m][i]) = it.pu_log_total[m][i];
    }
    if (pu_cap[m] >= 0) {
      x(pu_cap[m]) = it.pu_cap[m];
      x(pu_log_cap_hi[m]) = it.pu_log_cap_hi[m];
      x(pu_log_cap_lo[m]) = it.pu_log_cap_lo[m];
    }
    for (size_t k = 0; k < pu_eav_log_total[m].size(); ++k) {
      x(pu_eav_log_total[m][k]) = it.pu_eav_log_total[m][k];
      x(pu_eav_log_interf[m][k]) = it.pu_eav_log_interf[m][k];
    }
  }
  x(su_log_interf) = it.su_log_interf;
  x(su_log_total) = it.su_log_total;
  if (su_cap >= 0) {
    x(su_cap) = it.su_cap;
    x(su_log_cap_hi) = it.su_log_cap_hi;
    x(su_log_cap_lo) = it.su_log_cap_lo;
    for (size_t l = 0; l < su_eav_log_total.size(); ++l) {
      x(su_eav_log_total[l]) = it.su_eav_log_total[l];
      x(su_eav_log_interf[l]) = it.su_eav_log_interf[l];
    }
  }
  for (size_t j = 0; j < sic_sinr_floor.size(); ++j) {
    x(sic_sinr_floor[j]) = it.sic_sinr_floor[j];
    x(sic_log_sinr_floor[j]) = it.sic_log_sinr_floor[j];
    if (sic_eav_cap[j] >= 0) {
      x(sic_eav_cap[j]) = it.sic_eav_cap[j];
      x(sic_log_eav_cap[j]) = it.sic_log_eav_cap[j];
    }
    for (size_t zi = 0; zi < sic_log_interf[j].size(); ++zi) {
      x(sic_log_interf[j][zi]) = it.sic_log_interf[j][zi];
      x(sic_log_total[j][zi]) = it.sic_log_total[j][zi];
    }
  }
  for (size_t l = 0; l < sic_eav_log_total.size(); ++l)
    for (size_t j = 0; j < sic_eav_log_total[l].size(); ++j) {
      x(sic_eav_log_total[l][j]) = it.sic_eav_log_total[l][j];
      x(sic_eav_log_interf[l][j]) = it.sic_eav_log_interf[l][j];
    }
  return x;
}

void VarMap::decode(const RVector &x, CovarianceSolution &sol, ScaIterate &it) const {
  sol.w_p.clear();
  sol.sigma_p.clear();
  sol.w_s.clear();
  for (int m = 0; m < clusters; ++m) {
    sol.w_p.push_back(unpack_hermitian(x.data() + wp_off[m], npt));
    sol.sigma_p.push_back(unpack_hermitian(x.data() + sp_off[m], npt));
  }
  for (int j = 0; j < sus; ++j) sol.w_s.push_back(unpack_hermitian(x.data() + ws_off[j], nst));
  sol.sigma_s = with_an ? unpack_hermitian(x.data() + ss_off, nst) : CMatrix::Zero(nst, nst);

  it = ScaIterate{};
  it.pu_log_interf.resize(clusters);
  it.pu_log_total.resize(clusters);
  it.pu_eav_log_total.resize(clusters);
  it.pu_eav_log_interf.resize(clusters);
  for (int m = 0; m < clusters; ++m) {
    for (size_t i = 0; i < pu_log_interf[m].size(); ++i) {
      it.pu_log_interf[m].push_back(x(pu_log_interf[m][i]));
      it.pu_log_total[m].push_back(x(pu_log_total[m][i]));
    }
    if (pu_cap[m] >= 0) {
      it.pu_cap.push_back(x(pu_cap[m]));
      it.pu_log_cap_hi.push_back(x(pu_log_cap_hi[m]));
      it.pu_log_cap_lo.push_back(x(pu_log_cap_lo[m]));
    } else {
      it.pu_cap.push_back(1.0);
      it.pu_log_cap_hi.push_back(0.0);
      it.pu_log_cap_lo.push_back(0.0);
    }
    for (size_t k = 0; k < pu_eav_log_total[m].size(); ++k) {
      it.pu_eav_log_total[m].push_back(x(pu_eav_log_total[m][k]));
      it.pu_eav_log_interf[m].push_back(x(pu_eav_log_interf[m][k]));
    }
  }
  it.su_log_interf = x(su_log_interf);
  it.su_log_total = x(su_log_total);
  if (su_cap >= 0) {
    it.su_cap = x(su_cap);
    it.su_log_cap_hi = x(su_log_cap_hi);
    it.su_log_cap_lo = x(su_log_cap_lo);
    for (size_t l = 0; l < su_eav_log_total.size(); ++l) {
      it.su_eav_log_total.push_back(x(su_eav_log_total[l]));
      it.su_eav_log_interf.push_back(x(su_eav_log_interf[l]));
    }
  }
  it.sic_log_interf.resize(sic_sinr_floor.size());
  it.sic_log_total.resize(sic_sinr_floor.size());
  it.sic_eav_log_total.resize(sic_eav_log_total.size());
  it.sic_eav_log_interf.resize(sic_eav_log_interf.size());
  for (size_t j = 0; j < sic_sinr_floor.size(); ++j) {
    it.sic_sinr_floor.push_back(x(sic_sinr_floor[j]));
    it.sic_log_sinr_floor.push_back(x(sic_log_sinr_floor[j]));
    if (sic_eav_cap[j] >= 0) {
      it.sic_eav_cap.push_back(x(sic_eav_cap[j]));
      it.sic_log_eav_cap.push_back(x(sic_log_eav_cap[j]));
    } else {
      it.sic_eav_cap.push_back(1.0);
      it.sic_log_eav_cap.push_back(0.0);
    }
    for (size_t zi = 0; zi < sic_log_interf[j].size(); ++zi) {
      it.sic_log_interf[j].push_back(x(sic_log_interf[j][zi]));
      it.sic_log_total[j].push_back(x(sic_log_total[j][zi]));
    }
  }
  for (size_t l = 0; l < sic_eav_log_total.size(); ++l)
    for (size_t j = 0; j < sic_eav_log_total[l].size(); ++j) {
      it.sic_eav_log_total[l].push_back(x(sic_eav_log_total[l][j]));
      it.sic_eav_log_interf[l].push_back(x(sic_eav_log_interf[l][j]));
    }
  it.anchor = sol;
}

SubproblemSolution solve_subproblem(const ConvexSubproblem &prob, const SolverSettings &settings,
                                    const RVector *warm) {
  // default start: the linearization anchor
  SubproblemSolution out;
  auto solver = make_cone_solver(settings.backend);
  const RVector &start =
      (warm && warm->size() == prob.start.size()) ? *warm : prob.start;
  const ConeSolution cs = solver->solve(prob.program, &start, settings.barrier);
  out.status = cs.status;
  out.newton_steps = cs.newton_steps;
  out.message = cs.message;
  if (cs.status == SolveStatus::optimal) {
    prob.map.decode(cs.x, out.sol, out.aux);
    out.objective = cs.objective;
    out.interior_hint = cs.interior_hint;
    out.interior_hint_t = cs.interior_hint_t;
  }
  return out;
}

ScaIterate update_iterate(const SubproblemSolution &solution) {
  if (solution.status != SolveStatus::optimal)
    throw std::logic_error("update_iterate requires an optimal subproblem solution");
  return solution.aux;
}

namespace {

void perturb_linearization(ScaIterate &it, double eps) {
  auto bump2 = [&](std::vector<std::vector<double>> &v) {
    for (auto &row : v)
      for (double &x : row) x += eps;
  };
  auto bump1 = [&](std::vector<double> &v) {
    for (double &x : v) x += eps;
  };
  bump2(it.pu_log_interf);
  bump1(it.pu_log_cap_hi);
  bump2(it.pu_eav_log_total);
  it.su_log_interf += eps;
  it.su_log_cap_hi += eps;
  bump1(it.su_eav_log_total);
  bump2(it.sic_log_interf);
  bump1(it.sic_log_sinr_floor);
  bump2(it.sic_eav_log_total);
}

}  // namespace

ScaResult run_sca(const ChannelSet &ch, const QosRequirements &reqs, const EhCircuitParams &eh,
                  const SolverSettings &settings, std::uint64_t rng_seed, const ScaOptions &opts) {
  ScaResult res;
  const int extra = opts.anchor ? 1 : 0;
  for (int attempt = 0; attempt <= settings.restart_limit + extra; ++attempt) {
    res.restarts = attempt;
    ScaIterate it;
    if (opts.anchor && attempt == 0) {
      it = compute_iterate_at(ch, *opts.anchor);
    } else {
      try {
        it = initialize_iterate(ch, reqs, eh, rng_seed, attempt - extra);
      } catch (const init_infeasible_error &e) {
        res.message = e.what();
        continue;
      }
    }

    std::vector<double> trace;
    SubproblemSolution last;
    bool have_last = false;
    bool perturbed = false;
    bool first_round_dead = false;
    bool converged = false;

    RVector hint;
    double hint_t = 0.0;
    int n = 1;
    while (n <= settings.max_iterations) {
      ConvexSubproblem prob = build_subproblem(ch, reqs, eh, it, {opts.with_an});
      SolverSettings stg = settings;
      stg.barrier.warm_t = hint_t;
      SubproblemSolution ss = solve_subproblem(prob, stg, hint.size() ? &hint : nullptr);
      if (ss.status == SolveStatus::numeric_failure && !perturbed) {
        perturbed = true;
        perturb_linearization(it, 1e-6);
        continue;  // retry this round once from a nudged linearization
      }
      if (ss.status != SolveStatus::optimal) {
        if (!have_last) {
          first_round_dead = true;
          res.message = "round 1 " + std::string(to_string(ss.status)) +
                        (ss.message.empty() ? "" : ": " + ss.message);
        } else {
          res.message = "round " + std::to_string(n) + " " + to_string(ss.status) +
                        "; keeping last solution";
        }
        break;
      }
      trace.push_back(ss.objective);
      hint = ss.interior_hint;
      hint_t = ss.interior_hint_t;
      last = ss;
      have_last = true;
      const size_t k = trace.size();
      if (k >= 2 && std::abs(trace[k - 1] - trace[k - 2]) <= settings.tolerance) {
        converged = true;
        break;
      }
      it = update_iterate(ss);
      ++n;
    }

    if (first_round_dead) continue;  // re-initialize and try again

    res.converged = converged;
    res.status = converged ? ScaResult::Status::converged : ScaResult::Status::not_converged;
    res.relaxed = last.sol;
    res.objective = last.objective;
    res.trace = std::move(trace);
    res.iterations = static_cast<int>(res.trace.size());
    return res;
  }
  res.status = ScaResult::Status::infeasible;
  if (res.message.empty()) res.message = "all initializations led to infeasible first rounds";
  return res;
}

}  // namespace secnoma
