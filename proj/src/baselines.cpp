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

#include "secnoma/baselines.hpp"

#include <cmath>

namespace secnoma {

ScaResult solve_no_jamming(const ChannelSet &ch, const QosRequirements &reqs,
                           const EhCircuitParams &eh, const SolverSettings &settings,
                           std::uint64_t rng_seed) {
  ScaOptions opts;
  opts.with_an = false;
  return run_sca(ch, reqs, eh, settings, rng_seed, opts);
}

double oma_objective(const CovarianceSolution &sol) {
  double p = sol.sigma_s.trace().real();
  for (const auto &m : sol.w_p) p += m.trace().real();
  for (const auto &m : sol.sigma_p) p += m.trace().real();
  double slot = 0.0;
  for (const auto &m : sol.w_s) slot += m.trace().real();
  return p + slot / static_cast<double>(sol.w_s.size());
}

CovarianceSolution oma_slot_view(const CovarianceSolution &sol, int slot) {
  CovarianceSolution v = sol;
  for (size_t j = 0; j < v.w_s.size(); ++j)
    if (static_cast<int>(j) != slot) v.w_s[j].setZero();
  return v;
}

namespace {

constexpr double kLn2 = 0.6931471805599453;

// ln of the logistic 1/(1+e^-x), evaluated stably
double log_logistic(double x) {
  return x >= 0.0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x));
}

struct OmaIterate {
  // primary-side groups, one per slot
  std::vector<std::vector<std::vector<double>>> pu_log_interf, pu_log_total;  // [t][m][i]
  std::vector<std::vector<double>> pu_cap, pu_log_cap_hi, pu_log_cap_lo;      // [t][m]
  std::vector<std::vector<std::vector<double>>> pu_eav_log_total, pu_eav_log_interf;
  // one SU group per slot
  std::vector<double> su_log_interf, su_log_total, su_cap, su_log_cap_hi, su_log_cap_lo;
  std::vector<std::vector<double>> su_eav_log_total, su_eav_log_interf;  // [j][l]
  // log-logistic values of the per-slot harvesting inputs
  std::vector<std::vector<std::vector<double>>> eh_pri_sigma;  // [t][m][k]
  std::vector<std::vector<double>> eh_sec_sigma;               // [t][l]
  CovarianceSolution anchor;
};

OmaIterate compute_oma_iterate_at(const ChannelSet &ch, const EhCircuitParams &eh,
                                  const CovarianceSolution &sol) {
  const auto &topo = ch.topology;
  const int ns = topo.sus;
  OmaIterate it;
  it.anchor = sol;
  it.pu_log_interf.resize(ns);
  it.pu_log_total.resize(ns);
  it.pu_cap.resize(ns);
  it.pu_log_cap_hi.resize(ns);
  it.pu_log_cap_lo.resize(ns);
  it.pu_eav_log_total.resize(ns);
  it.pu_eav_log_interf.resize(ns);
  it.eh_pri_sigma.resize(ns);
  it.eh_sec_sigma.resize(ns);

  for (int t = 0; t < ns; ++t) {
    const CovarianceSolution slot = oma_slot_view(sol, t);
    const PowerTerms pt = power_terms(ch, slot);
    it.pu_log_interf[t].resize(topo.clusters);
    it.pu_log_total[t].resize(topo.clusters);
    it.pu_eav_log_total[t].resize(topo.clusters);
    it.pu_eav_log_interf[t].resize(topo.clusters);
    it.eh_pri_sigma[t].resize(topo.clusters);
    for (int m = 0; m < topo.clusters; ++m) {
      for (int i = 0; i < topo.pus_per_cluster[m]; ++i) {
        const double u = ch.sigma2_p[m][i];
        const double own = quad_form(slot.w_p[m], ch.h_p[m][i]);
        it.pu_log_interf[t][m].push_back(std::log((pt.gamma_p[m][i] - own) / u));
        it.pu_log_total[t][m].push_back(std::log(pt.gamma_p[m][i] / u));
      }
      double cap = 1.0;
      for (int k = 0; k < topo.ehrs_per_cluster[m]; ++k) {
        const double ue = ch.sigma2_e_pri[m][k];
        const double num = pt.gamma_e[m][k] + ue;
        const double den = num - quad_form(slot.w_p[m], ch.g_emk[m][k]);
        cap = std::max(cap, num / den);
        it.pu_eav_log_total[t][m].push_back(std::log(num / ue));
        it.pu_eav_log_interf[t][m].push_back(std::log(den / ue));
        it.eh_pri_sigma[t][m].push_back(
            log_logistic(eh.a * (pt.gamma_e[m][k] - eh.b)));
      }
      it.pu_cap[t].push_back(cap);
      it.pu_log_cap_hi[t].push_back(std::log(cap));
      it.pu_log_cap_lo[t].push_back(std::log(cap));
    }
    // SU t is the one served in this slot
    {
      const double u = ch.sigma2_s[t];
      const double own = quad_form(slot.w_s[t], ch.h_s[t]);
      it.su_log_interf.push_back(std::log((pt.gamma_s[t] - own) / u));
      it.su_log_total.push_back(std::log(pt.gamma_s[t] / u));
      double cap = 1.0;
      std::vector<double> lt, li;
      for (int l = 0; l < topo.secondary_ehrs; ++l) {
        const double ue = ch.sigma2_e_sec[l];
        const double num = pt.lambda_e[l][t];
        const double den = num - quad_form(slot.w_s[t], ch.g_el[l]);
        cap = std::max(cap, num / den);
        lt.push_back(std::log(num / ue));
        li.push_back(std::log(den / ue));
      }
      it.su_cap.push_back(cap);
      it.su_log_cap_hi.push_back(std::log(cap));
      it.su_log_cap_lo.push_back(std::log(cap));
      it.su_eav_log_total.push_back(std::move(lt));
      it.su_eav_log_interf.push_back(std::move(li));
    }
    for (int l = 0; l < topo.secondary_ehrs; ++l) {
      const double rf = pt.lambda_sl[l][0] - ch.sigma2_e_sec[l];
      it.eh_sec_sigma[t].push_back(log_logistic(eh.a * (rf - eh.b)));
    }
  }
  return it;
}

struct OmaMap {
  int npt = 0, nst = 0, clusters = 0, sus = 0;
  std::vector<int> wp_off, sp_off, ws_off;
  int ss_off = -1;
  int nvars = 0;
  std::vector<std::vector<std::vector<int>>> pu_log_interf, pu_log_total;
  std::vector<std::vector<int>> pu_cap, pu_log_cap_hi, pu_log_cap_lo;
  std::vector<std::vector<std::vector<int>>> pu_eav_log_total, pu_eav_log_interf;
  std::vector<int> su_log_interf, su_log_total, su_cap, su_log_cap_hi, su_log_cap_lo;
  std::vector<std::vector<int>> su_eav_log_total, su_eav_log_interf;
  std::vector<std::vector<std::vector<int>>> eh_pri_sigma, eh_pri_u1, eh_pri_u2;
  std::vector<std::vector<int>> eh_sec_sigma, eh_sec_u1, eh_sec_u2;
};

struct OmaSubproblem {
  ConicProgram program;
  OmaMap map;
  RVector start;
};

OmaSubproblem build_oma_subproblem(const ChannelSet &ch, const QosRequirements &reqs,
                                   const EhCircuitParams &eh, const OmaIterate &it) {
  const auto &topo = ch.topology;
  const OuterProducts op = outer_product_cache(ch);
  const int npt = topo.pbs_antennas, nst = topo.cbs_antennas;
  const int ns = topo.sus;
  const bool sec_eav = topo.secondary_ehrs > 0;

  OmaMap map;
  map.npt = npt;
  map.nst = nst;
  map.clusters = topo.clusters;
  map.sus = ns;
  int pos = 0;
  for (int m = 0; m < topo.clusters; ++m) {
    map.wp_off.push_back(pos);
    pos += npt * npt;
  }
  for (int m = 0; m < topo.clusters; ++m) {
    map.sp_off.push_back(pos);
    pos += npt * npt;
  }
  for (int j = 0; j < ns; ++j) {
    map.ws_off.push_back(pos);
    pos += nst * nst;
  }
  map.ss_off = pos;
  pos += nst * nst;

  auto alloc = [&]() { return pos++; };
  map.pu_log_interf.resize(ns);
  map.pu_log_total.resize(ns);
  map.pu_cap.resize(ns);
  map.pu_log_cap_hi.resize(ns);
  map.pu_log_cap_lo.resize(ns);
  map.pu_eav_log_total.resize(ns);
  map.pu_eav_log_interf.resize(ns);
  map.eh_pri_sigma.resize(ns);
  map.eh_pri_u1.resize(ns);
  map.eh_pri_u2.resize(ns);
  map.eh_sec_sigma.resize(ns);
  map.eh_sec_u1.resize(ns);
  map.eh_sec_u2.resize(ns);
  for (int t = 0; t < ns; ++t) {
    map.pu_log_interf[t].resize(topo.clusters);
    map.pu_log_total[t].resize(topo.clusters);
    map.pu_eav_log_total[t].resize(topo.clusters);
    map.pu_eav_log_interf[t].resize(topo.clusters);
    map.eh_pri_sigma[t].resize(topo.clusters);
    map.eh_pri_u1[t].resize(topo.clusters);
    map.eh_pri_u2[t].resize(topo.clusters);
    for (int m = 0; m < topo.clusters; ++m) {
      const bool eav = topo.ehrs_per_cluster[m] > 0;
      for (int i = 0; i < topo.pus_per_cluster[m]; ++i) {
        map.pu_log_interf[t][m].push_back(alloc());
        map.pu_log_total[t][m].push_back(alloc());
      }
      map.pu_cap[t].push_back(eav ? alloc() : -1);
      map.pu_log_cap_hi[t].push_back(eav ? alloc() : -1);
      map.pu_log_cap_lo[t].push_back(eav ? alloc() : -1);
      for (int k = 0; k < topo.ehrs_per_cluster[m]; ++k) {
        map.pu_eav_log_total[t][m].push_back(alloc());
        map.pu_eav_log_interf[t][m].push_back(alloc());
        map.eh_pri_sigma[t][m].push_back(alloc());
        map.eh_pri_u1[t][m].push_back(alloc());
        map.eh_pri_u2[t][m].push_back(alloc());
      }
    }
    map.su_log_interf.push_back(alloc());
    map.su_log_total.push_back(alloc());
    map.su_cap.push_back(sec_eav ? alloc() : -1);
    map.su_log_cap_hi.push_back(sec_eav ? alloc() : -1);
    map.su_log_cap_lo.push_back(sec_eav ? alloc() : -1);
    std::vector<int> et, ei;
    for (int l = 0; l < topo.secondary_ehrs; ++l) {
      et.push_back(alloc());
      ei.push_back(alloc());
      map.eh_sec_sigma[t].push_back(alloc());
      map.eh_sec_u1[t].push_back(alloc());
      map.eh_sec_u2[t].push_back(alloc());
    }
    map.su_eav_log_total.push_back(std::move(et));
    map.su_eav_log_interf.push_back(std::move(ei));
  }
  map.nvars = pos;

  OmaSubproblem out{ConicProgram(map.nvars), map, {}};
  ConicProgram &prog = out.program;
  auto add_block_cost = [&](int off, int dim, double w, const std::string &tag) {
    prog.add_block(off, dim, tag);
    for (int j = 0; j < dim; ++j) prog.cost()(off + (j + 1) * (j + 1) - 1) = w;
  };
  for (int m = 0; m < topo.clusters; ++m)
    add_block_cost(map.wp_off[m], npt, 1.0, "W_p[" + std::to_string(m) + "]");
  for (int m = 0; m < topo.clusters; ++m)
    add_block_cost(map.sp_off[m], npt, 1.0, "Sigma_p[" + std::to_string(m) + "]");
  for (int j = 0; j < ns; ++j)
    add_block_cost(map.ws_off[j], nst, 1.0 / ns, "W_s[" + std::to_string(j) + "]");
  add_block_cost(map.ss_off, nst, 1.0, "Sigma_s");

  auto add_tr = [&](RVector &a, int off, const CMatrix &h, double s) {
    RVector p = pack_hermitian(h);
    a.segment(off, p.size()) += s * p;
  };
  auto pbs_all = [&](RVector &a, const CMatrix &h, double s, int skip_wp = -1) {
    for (int m = 0; m < topo.clusters; ++m) {
      if (m != skip_wp) add_tr(a, map.wp_off[m], h, s);
      add_tr(a, map.sp_off[m], h, s);
    }
  };
  // CBS covariance active in slot t
  auto cbs_slot = [&](RVector &a, int t, const CMatrix &h, double s, bool with_beam = true) {
    if (with_beam) add_tr(a, map.ws_off[t], h, s);
    add_tr(a, map.ss_off, h, s);
  };
  auto zero = [&]() { return RVector::Zero(map.nvars).eval(); };
  auto sub2 = [](int a, int b) { return "[" + std::to_string(a) + "," + std::to_string(b) + "]"; };
  auto sub3 = [](int a, int b, int c) {
    return "[" + std::to_string(a) + "," + std::to_string(b) + "," + std::to_string(c) + "]";
  };

  for (int t = 0; t < ns; ++t) {
    // primary secrecy holds against the CBS emissions of every slot
    for (int m = 0; m < topo.clusters; ++m) {
      const bool eav = topo.ehrs_per_cluster[m] > 0;
      for (int i = 0; i < topo.pus_per_cluster[m]; ++i) {
        const double u = ch.sigma2_p[m][i];
        const double at = it.pu_log_interf[t][m][i];
        {
          RVector a = zero();
          a(map.pu_log_interf[t][m][i]) = 1.0;
          if (eav) a(map.pu_log_cap_hi[t][m]) = 1.0;
          a(map.pu_log_total[t][m][i]) = -1.0;
          prog.add_affine(std::move(a), -reqs.gamma_p[m][i] * kLn2,
                          "pu-rate-budget" + sub3(t, m, i));
        }
        {
          RVector a = zero();
          pbs_all(a, op.h_p[m][i], 1.0 / u, m);
          cbs_slot(a, t, op.f_s[m][i], 1.0 / u);
          a(map.pu_log_interf[t][m][i]) = -std::exp(at);
          prog.add_affine(std::move(a), std::exp(at) * (1.0 - at) - 1.0,
                          "pu-interference-ub" + sub3(t, m, i));
        }
        {
          RVector uvec = zero(), vvec = zero();
          pbs_all(uvec, op.h_p[m][i], 1.0 / u);
          cbs_slot(uvec, t, op.f_s[m][i], 1.0 / u);
          vvec(map.pu_log_total[t][m][i]) = 1.0;
          prog.add_exp(std::move(uvec), 1.0, std::move(vvec), 0.0,
                       "pu-signal-lb" + sub3(t, m, i));
        }
      }
      if (eav) {
        const double bt = it.pu_log_cap_hi[t][m];
        {
          RVector a = zero();
          a(map.pu_cap[t][m]) = 1.0;
          a(map.pu_log_cap_hi[t][m]) = -std::exp(bt);
          prog.add_affine(std::move(a), std::exp(bt) * (1.0 - bt), "pu-tau-ub" + sub2(t, m));
        }
        {
          RVector uvec = zero(), vvec = zero();
          uvec(map.pu_cap[t][m]) = 1.0;
          vvec(map.pu_log_cap_lo[t][m]) = 1.0;
          prog.add_exp(std::move(uvec), 0.0, std::move(vvec), 0.0, "pu-tau-lb" + sub2(t, m));
        }
        for (int k = 0; k < topo.ehrs_per_cluster[m]; ++k) {
          const double ue = ch.sigma2_e_pri[m][k];
          const double mt = it.pu_eav_log_total[t][m][k];
          {
            RVector a = zero();
            a(map.pu_eav_log_total[t][m][k]) = 1.0;
            a(map.pu_eav_log_interf[t][m][k]) = -1.0;
            a(map.pu_log_cap_lo[t][m]) = -1.0;
            prog.add_affine(std::move(a), 0.0, "pu-eav-budget" + sub3(t, m, k));
          }
          {
            RVector a = zero();
            pbs_all(a, op.g_emk[m][k], 1.0 / ue);
            cbs_slot(a, t, op.f_emk[m][k], 1.0 / ue);
            a(map.pu_eav_log_total[t][m][k]) = -std::exp(mt);
            prog.add_affine(std::move(a), std::exp(mt) * (1.0 - mt) - 1.0,
                            "pu-eav-num-ub" + sub3(t, m, k));
          }
          {
            RVector uvec = zero(), vvec = zero();
            pbs_all(uvec, op.g_emk[m][k], 1.0 / ue, m);
            cbs_slot(uvec, t, op.f_emk[m][k], 1.0 / ue);
            vvec(map.pu_eav_log_interf[t][m][k]) = 1.0;
            prog.add_exp(std::move(uvec), 1.0, std::move(vvec), 0.0,
                         "pu-eav-den-lb" + sub3(t, m, k));
          }
        }
      }
      // interference cap per slot
      for (int i = 0; i < topo.pus_per_cluster[m]; ++i) {
        RVector a = zero();
        cbs_slot(a, t, op.f_s[m][i], 1.0);
        prog.add_affine(std::move(a), reqs.upsilon[m][i], "cbs-interference-cap" + sub3(t, m, i));
      }
    }

    // the slot's SU: full rate divided by the slot count must meet gamma
    {
      const int j = t;
      const double u = ch.sigma2_s[j];
      const double at = it.su_log_interf[j];
      const double gamma_eff = ns * reqs.gamma_s[j];
      {
        RVector a = zero();
        a(map.su_log_interf[j]) = 1.0;
        if (sec_eav) a(map.su_log_cap_hi[j]) = 1.0;
        a(map.su_log_total[j]) = -1.0;
        prog.add_affine(std::move(a), -gamma_eff * kLn2, "su-rate-budget" + sub2(t, j));
      }
      {
        RVector a = zero();
        pbs_all(a, op.q_p[j], 1.0 / u);
        cbs_slot(a, t, op.h_s[j], 1.0 / u, /*with_beam=*/false);
        a(map.su_log_interf[j]) = -std::exp(at);
        prog.add_affine(std::move(a), std::exp(at) * (1.0 - at) - 1.0,
                        "su-interference-ub" + sub2(t, j));
      }
      {
        RVector uvec = zero(), vvec = zero();
        pbs_all(uvec, op.q_p[j], 1.0 / u);
        cbs_slot(uvec, t, op.h_s[j], 1.0 / u);
        vvec(map.su_log_total[j]) = 1.0;
        prog.add_exp(std::move(uvec), 1.0, std::move(vvec), 0.0, "su-signal-lb" + sub2(t, j));
      }
      if (sec_eav) {
        const double bt = it.su_log_cap_hi[j];
        {
          RVector a = zero();
          a(map.su_cap[j]) = 1.0;
          a(map.su_log_cap_hi[j]) = -std::exp(bt);
          prog.add_affine(std::move(a), std::exp(bt) * (1.0 - bt), "su-tau-ub" + sub2(t, j));
        }
        {
          RVector uvec = zero(), vvec = zero();
          uvec(map.su_cap[j]) = 1.0;
          vvec(map.su_log_cap_lo[j]) = 1.0;
          prog.add_exp(std::move(uvec), 0.0, std::move(vvec), 0.0, "su-tau-lb" + sub2(t, j));
        }
        for (int l = 0; l < topo.secondary_ehrs; ++l) {
          const double ue = ch.sigma2_e_sec[l];
          const double mt = it.su_eav_log_total[j][l];
          {
            RVector a = zero();
            a(map.su_eav_log_total[j][l]) = 1.0;
            a(map.su_eav_log_interf[j][l]) = -1.0;
            a(map.su_log_cap_lo[j]) = -1.0;
            prog.add_affine(std::move(a), 0.0, "su-eav-budget" + sub2(j, l));
          }
          {
            RVector a = zero();
            pbs_all(a, op.q_el[l], 1.0 / ue);
            cbs_slot(a, t, op.g_el[l], 1.0 / ue);
            a(map.su_eav_log_total[j][l]) = -std::exp(mt);
            prog.add_affine(std::move(a), std::exp(mt) * (1.0 - mt) - 1.0,
                            "su-eav-num-ub" + sub2(j, l));
          }
          {
            RVector uvec = zero(), vvec = zero();
            pbs_all(uvec, op.q_el[l], 1.0 / ue);
            cbs_slot(uvec, t, op.g_el[l], 1.0 / ue, /*with_beam=*/false);
            vvec(map.su_eav_log_interf[j][l]) = 1.0;
            prog.add_exp(std::move(uvec), 1.0, std::move(vvec), 0.0,
                         "su-eav-den-lb" + sub2(j, l));
          }
        }
      }
    }
  }

  // averaged harvesting: log-logistic lift per (receiver, slot), tangent
  // lower bound tying the slot values to the average requirement
  const double psi = eh.psi();
  auto eh_rows = [&](const std::vector<int> &sig, const std::vector<int> &u1,
                     const std::vector<int> &u2, const std::vector<double> &sig_tilde,
                     auto &&rf_coeffs, double zeta, const std::string &tag) {
    // rf_coeffs(a, t, scale) adds the slot-t RF power terms (watts)
    for (int t = 0; t < ns; ++t) {
      {
        RVector uvec = zero(), vvec = zero();
        uvec(u1[t]) = 1.0;
        vvec(sig[t]) = 1.0;
        prog.add_exp(std::move(uvec), 0.0, std::move(vvec), 0.0, tag + "-lift-a[" +
                                                                     std::to_string(t) + "]");
      }
      {
        RVector uvec = zero(), vvec = zero();
        uvec(u2[t]) = 1.0;
        vvec(sig[t]) = 1.0;
        rf_coeffs(vvec, t, -eh.a);
        prog.add_exp(std::move(uvec), 0.0, std::move(vvec), eh.a * eh.b,
                     tag + "-lift-b[" + std::to_string(t) + "]");
      }
      {
        RVector a = zero();
        a(u1[t]) = 1.0;
        a(u2[t]) = 1.0;
        prog.add_affine(std::move(a), 1.0, tag + "-lift-sum[" + std::to_string(t) + "]");
      }
    }
    const double s_req = ns * (zeta * (1.0 - psi) / eh.p_max + psi);
    RVector a = zero();
    double rhs = -s_req;
    for (int t = 0; t < ns; ++t) {
      const double w = std::exp(sig_tilde[t]);
      a(sig[t]) = -w;
      rhs += w * (1.0 - sig_tilde[t]);
    }
    prog.add_affine(std::move(a), rhs, tag + "-average");
  };

  for (int m = 0; m < topo.clusters; ++m)
    for (int k = 0; k < topo.ehrs_per_cluster[m]; ++k) {
      std::vector<int> sig, u1, u2;
      std::vector<double> st;
      for (int t = 0; t < ns; ++t) {
        sig.push_back(map.eh_pri_sigma[t][m][k]);
        u1.push_back(map.eh_pri_u1[t][m][k]);
        u2.push_back(map.eh_pri_u2[t][m][k]);
        st.push_back(it.eh_pri_sigma[t][m][k]);
      }
      eh_rows(sig, u1, u2, st,
              [&](RVector &a, int t, double s) {
                pbs_all(a, op.g_emk[m][k], s);
                cbs_slot(a, t, op.f_emk[m][k], s);
              },
              reqs.zeta_primary, "eh-primary" + sub2(m, k));
    }
  for (int l = 0; l < topo.secondary_ehrs; ++l) {
    std::vector<int> sig, u1, u2;
    std::vector<double> st;
    for (int t = 0; t < ns; ++t) {
      sig.push_back(map.eh_sec_sigma[t][l]);
      u1.push_back(map.eh_sec_u1[t][l]);
      u2.push_back(map.eh_sec_u2[t][l]);
      st.push_back(it.eh_sec_sigma[t][l]);
    }
    eh_rows(sig, u1, u2, st,
            [&](RVector &a, int t, double s) {
              pbs_all(a, op.q_el[l], s);
              cbs_slot(a, t, op.g_el[l], s);
            },
            reqs.zeta_secondary, "eh-secondary[" + std::to_string(l) + "]");
  }

  // start point: anchor covariances plus the anchored auxiliary values
  RVector x = RVector::Zero(map.nvars);
  for (int m = 0; m < topo.clusters; ++m) {
    pack_hermitian_into(it.anchor.w_p[m], x.data() + map.wp_off[m]);
    pack_hermitian_into(it.anchor.sigma_p[m], x.data() + map.sp_off[m]);
  }
  for (int j = 0; j < ns; ++j) pack_hermitian_into(it.anchor.w_s[j], x.data() + map.ws_off[j]);
  pack_hermitian_into(it.anchor.sigma_s, x.data() + map.ss_off);
  for (int t = 0; t < ns; ++t) {
    for (int m = 0; m < topo.clusters; ++m) {
      for (size_t i = 0; i < map.pu_log_interf[t][m].size(); ++i) {
        x(map.pu_log_interf[t][m][i]) = it.pu_log_interf[t][m][i];
        x(map.pu_log_total[t][m][i]) = it.pu_log_total[t][m][i];
      }
      if (map.pu_cap[t][m] >= 0) {
        x(map.pu_cap[t][m]) = it.pu_cap[t][m];
        x(map.pu_log_cap_hi[t][m]) = it.pu_log_cap_hi[t][m];
        x(map.pu_log_cap_lo[t][m]) = it.pu_log_cap_lo[t][m];
      }
      for (size_t k = 0; k < map.pu_eav_log_total[t][m].size(); ++k) {
        x(map.pu_eav_log_total[t][m][k]) = it.pu_eav_log_total[t][m][k];
        x(map.pu_eav_log_interf[t][m][k]) = it.pu_eav_log_interf[t][m][k];
        x(map.eh_pri_sigma[t][m][k]) = it.eh_pri_sigma[t][m][k];
        x(map.eh_pri_u1[t][m][k]) = std::exp(it.eh_pri_sigma[t][m][k]);
        x(map.eh_pri_u2[t][m][k]) = 1.0 - std::exp(it.eh_pri_sigma[t][m][k]);
      }
    }
    x(map.su_log_interf[t]) = it.su_log_interf[t];
    x(map.su_log_total[t]) = it.su_log_total[t];
    if (map.su_cap[t] >= 0) {
      x(map.su_cap[t]) = it.su_cap[t];
      x(map.su_log_cap_hi[t]) = it.su_log_cap_hi[t];
      x(map.su_log_cap_lo[t]) = it.su_log_cap_lo[t];
      for (size_t l = 0; l < map.su_eav_log_total[t].size(); ++l) {
        x(map.su_eav_log_total[t][l]) = it.su_eav_log_total[t][l];
        x(map.su_eav_log_interf[t][l]) = it.su_eav_log_interf[t][l];
      }
    }
    for (size_t l = 0; l < map.eh_sec_sigma[t].size(); ++l) {
      x(map.eh_sec_sigma[t][l]) = it.eh_sec_sigma[t][l];
      x(map.eh_sec_u1[t][l]) = std::exp(it.eh_sec_sigma[t][l]);
      x(map.eh_sec_u2[t][l]) = 1.0 - std::exp(it.eh_sec_sigma[t][l]);
    }
  }
  out.start = std::move(x);
  return out;
}

void decode_oma(const OmaMap &map, const EhCircuitParams &, const RVector &x,
                CovarianceSolution &sol, OmaIterate &it) {
  sol.w_p.clear();
  sol.sigma_p.clear();
  sol.w_s.clear();
  for (int m = 0; m < map.clusters; ++m) {
    sol.w_p.push_back(unpack_hermitian(x.data() + map.wp_off[m], map.npt));
    sol.sigma_p.push_back(unpack_hermitian(x.data() + map.sp_off[m], map.npt));
  }
  for (int j = 0; j < map.sus; ++j)
    sol.w_s.push_back(unpack_hermitian(x.data() + map.ws_off[j], map.nst));
  sol.sigma_s = unpack_hermitian(x.data() + map.ss_off, map.nst);

  it = OmaIterate{};
  it.anchor = sol;
  const int ns = map.sus;
  it.pu_log_interf.resize(ns);
  it.pu_log_total.resize(ns);
  it.pu_cap.resize(ns);
  it.pu_log_cap_hi.resize(ns);
  it.pu_log_cap_lo.resize(ns);
  it.pu_eav_log_total.resize(ns);
  it.pu_eav_log_interf.resize(ns);
  it.eh_pri_sigma.resize(ns);
  it.eh_sec_sigma.resize(ns);
  for (int t = 0; t < ns; ++t) {
    it.pu_log_interf[t].resize(map.clusters);
    it.pu_log_total[t].resize(map.clusters);
    it.pu_eav_log_total[t].resize(map.clusters);
    it.pu_eav_log_interf[t].resize(map.clusters);
    it.eh_pri_sigma[t].resize(map.clusters);
    for (int m = 0; m < map.clusters; ++m) {
      for (size_t i = 0; i < map.pu_log_interf[t][m].size(); ++i) {
        it.pu_log_interf[t][m].push_back(x(map.pu_log_interf[t][m][i]));
        it.pu_log_total[t][m].push_back(x(map.pu_log_total[t][m][i]));
      }
      if (map.pu_cap[t][m] >= 0) {
        it.pu_cap[t].push_back(x(map.pu_cap[t][m]));
        it.pu_log_cap_hi[t].push_back(x(map.pu_log_cap_hi[t][m]));
        it.pu_log_cap_lo[t].push_back(x(map.pu_log_cap_lo[t][m]));
      } else {
        it.pu_cap[t].push_back(1.0);
        it.pu_log_cap_hi[t].push_back(0.0);
        it.pu_log_cap_lo[t].push_back(0.0);
      }
      for (size_t k = 0; k < map.pu_eav_log_total[t][m].size(); ++k) {
        it.pu_eav_log_total[t][m].push_back(x(map.pu_eav_log_total[t][m][k]));
        it.pu_eav_log_interf[t][m].push_back(x(map.pu_eav_log_interf[t][m][k]));
        it.eh_pri_sigma[t][m].push_back(x(map.eh_pri_sigma[t][m][k]));
      }
    }
    it.su_log_interf.push_back(x(map.su_log_interf[t]));
    it.su_log_total.push_back(x(map.su_log_total[t]));
    std::vector<double> lt, li;
    if (map.su_cap[t] >= 0) {
      it.su_cap.push_back(x(map.su_cap[t]));
      it.su_log_cap_hi.push_back(x(map.su_log_cap_hi[t]));
      it.su_log_cap_lo.push_back(x(map.su_log_cap_lo[t]));
      for (size_t l = 0; l < map.su_eav_log_total[t].size(); ++l) {
        lt.push_back(x(map.su_eav_log_total[t][l]));
        li.push_back(x(map.su_eav_log_interf[t][l]));
      }
    } else {
      it.su_cap.push_back(1.0);
      it.su_log_cap_hi.push_back(0.0);
      it.su_log_cap_lo.push_back(0.0);
    }
    it.su_eav_log_total.push_back(std::move(lt));
    it.su_eav_log_interf.push_back(std::move(li));
    for (size_t l = 0; l < map.eh_sec_sigma[t].size(); ++l)
      it.eh_sec_sigma[t].push_back(x(map.eh_sec_sigma[t][l]));
  }
}

OmaIterate initialize_oma(const ChannelSet &ch, const QosRequirements &reqs,
                          const EhCircuitParams &eh, std::uint64_t rng_seed, int restart) {
  const auto &topo = ch.topology;
  reqs.validate(topo, eh);
  Rng rng(seed_combine(seed_combine(rng_seed, 0x0111a7d3ULL), static_cast<std::uint64_t>(restart)));
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

  double p = 1e-3;
  for (int step = 0; step < 64; ++step, p *= 2.0) {
    CovarianceSolution sol;
    for (int m = 0; m < topo.clusters; ++m) {
      sol.w_p.push_back(p * dw_p[m]);
      sol.sigma_p.push_back(p * ds_p[m]);
    }
    for (int j = 0; j < topo.sus; ++j) sol.w_s.push_back(p * dw_s[j]);
    sol.sigma_s = p * ds_s;

    bool c3_ok = true, eh_ok = true;
    for (int t = 0; t < topo.sus && c3_ok; ++t) {
      const CovarianceSolution slot = oma_slot_view(sol, t);
      const CMatrix cbs = slot.cbs_total();
      for (int m = 0; m < topo.clusters && c3_ok; ++m)
        for (int i = 0; i < topo.pus_per_cluster[m] && c3_ok; ++i)
          c3_ok = quad_form(cbs, ch.f_s[m][i]) <= reqs.upsilon[m][i];
    }
    for (int m = 0; m < topo.clusters && eh_ok; ++m)
      for (int k = 0; k < topo.ehrs_per_cluster[m] && eh_ok; ++k) {
        double avg = 0.0;
        for (int t = 0; t < topo.sus; ++t)
          avg += harvested_power(
              std::max(0.0, primary_ehr_rf_power(ch, oma_slot_view(sol, t), m, k)), eh);
        eh_ok = avg / topo.sus >= reqs.zeta_primary;
      }
    for (int l = 0; l < topo.secondary_ehrs && eh_ok; ++l) {
      double avg = 0.0;
      for (int t = 0; t < topo.sus; ++t)
        avg += harvested_power(
            std::max(0.0, secondary_ehr_rf_power(ch, oma_slot_view(sol, t), l)), eh);
      eh_ok = avg / topo.sus >= reqs.zeta_secondary;
    }

    if (c3_ok && eh_ok) return compute_oma_iterate_at(ch, eh, sol);
    if (!c3_ok)
      throw init_infeasible_error(
          "initialization infeasible: interference cap binds before harvesting thresholds");
  }
  throw init_infeasible_error("initialization infeasible: doubling search exhausted");
}

void perturb_oma(OmaIterate &it, double eps) {
  for (auto &vt : it.pu_log_interf)
    for (auto &vm : vt)
      for (double &x : vm) x += eps;
  for (auto &vt : it.pu_log_cap_hi)
    for (double &x : vt) x += eps;
  for (auto &vt : it.pu_eav_log_total)
    for (auto &vm : vt)
      for (double &x : vm) x += eps;
  for (double &x : it.su_log_interf) x += eps;
  for (double &x : it.su_log_cap_hi) x += eps;
  for (auto &v : it.su_eav_log_total)
    for (double &x : v) x += eps;
  for (auto &vt : it.eh_pri_sigma)
    for (auto &vm : vt)
      for (double &x : vm) x -= eps;  // lower logistic anchor stays conservative
  for (auto &vt : it.eh_sec_sigma)
    for (double &x : vt) x -= eps;
}

}  // namespace

ScaResult solve_oma_tdma(const ChannelSet &ch, const QosRequirements &reqs,
                         const EhCircuitParams &eh, const SolverSettings &settings,
                         std::uint64_t rng_seed) {
  ScaResult res;
  auto solver = make_cone_solver(settings.backend);
  for (int attempt = 0; attempt <= settings.restart_limit; ++attempt) {
    res.restarts = attempt;
    OmaIterate it;
    try {
      it = initialize_oma(ch, reqs, eh, rng_seed, attempt);
    } catch (const init_infeasible_error &e) {
      res.message = e.what();
      continue;
    }

    std::vector<double> trace;
    CovarianceSolution last;
    double last_obj = 0.0;
    RVector hint;
    double hint_t = 0.0;
    bool have_last = false, perturbed = false, first_round_dead = false, converged = false;
    int n = 1;
    while (n <= settings.max_iterations) {
      OmaSubproblem prob = build_oma_subproblem(ch, reqs, eh, it);
      const RVector &start0 = hint.size() == prob.start.size() ? hint : prob.start;
      BarrierSettings bst = settings.barrier;
      bst.warm_t = hint_t;
      const ConeSolution cs = solver->solve(prob.program, &start0, bst);
      if (cs.status == SolveStatus::numeric_failure && !perturbed) {
        perturbed = true;
        perturb_oma(it, 1e-6);
        continue;
      }
      if (cs.status != SolveStatus::optimal) {
        if (!have_last) {
          first_round_dead = true;
          res.message = "round 1 " + std::string(to_string(cs.status)) +
                        (cs.message.empty() ? "" : ": " + cs.message);
        } else {
          res.message = "round " + std::to_string(n) + " " + to_string(cs.status) +
                        "; keeping last solution";
        }
        break;
      }
      CovarianceSolution sol;
      OmaIterate next;
      decode_oma(prob.map, eh, cs.x, sol, next);
      trace.push_back(cs.objective);
      hint = cs.interior_hint;
      hint_t = cs.interior_hint_t;
      last = sol;
      last_obj = cs.objective;
      have_last = true;
      const size_t k = trace.size();
      if (k >= 2 && std::abs(trace[k - 1] - trace[k - 2]) <= settings.tolerance) {
        converged = true;
        break;
      }
      it = next;
      ++n;
    }

    if (first_round_dead) continue;
    res.converged = converged;
    res.status = converged ? ScaResult::Status::converged : ScaResult::Status::not_converged;
    res.relaxed = last;
    res.objective = last_obj;
    res.trace = std::move(trace);
    res.iterations = static_cast<int>(res.trace.size());
    return res;
  }
  res.status = ScaResult::Status::infeasible;
  if (res.message.empty()) res.message = "all initializations led to infeasible first rounds";
  return res;
}

FeasibilityReport verify_oma_feasibility(const ChannelSet &ch, const CovarianceSolution &sol,
                                         const QosRequirements &reqs, const EhCircuitParams &eh,
                                         const FeasibilityTolerance &tol) {
  const auto &topo = ch.topology;
  const int ns = topo.sus;
  FeasibilityReport rep;
  rep.c1 = rep.c2 = rep.c3 = rep.c4 = rep.c5 = true;

  auto add = [&](const std::string &id, double margin, double tolerance, bool &family) {
    ConstraintCheck c;
    c.id = id;
    c.margin = margin;
    c.satisfied = margin >= -tolerance;
    family = family && c.satisfied;
    rep.checks.push_back(std::move(c));
  };
  auto guarded = [&](auto &&fn) {
    try {
      return fn();
    } catch (const numeric_domain_error &) {
      return -std::numeric_limits<double>::infinity();
    }
  };

  std::vector<CovarianceSolution> slots;
  std::vector<PowerTerms> pts;
  for (int t = 0; t < ns; ++t) {
    slots.push_back(oma_slot_view(sol, t));
    pts.push_back(power_terms(ch, slots.back()));
  }

  for (int t = 0; t < ns; ++t)
    for (int m = 0; m < topo.clusters; ++m)
      for (int i = 0; i < topo.pus_per_cluster[m]; ++i) {
        const double r =
            guarded([&] { return pu_secrecy_rate(ch, pts[t], slots[t], m, i); });
        add("C1[t=" + std::to_string(t) + ",m=" + std::to_string(m) + ",i=" + std::to_string(i) +
                "]",
            r - reqs.gamma_p[m][i], tol.rate, rep.c1);
      }
  for (int j = 0; j < ns; ++j) {
    const double r = guarded([&] {
      const double gs = pts[j].gamma_s[j];
      const double own = quad_form(slots[j].w_s[j], ch.h_s[j]);
      if (!(gs > 0.0) || !(gs - own > 0.0)) throw numeric_domain_error("oma su ratio");
      double rate = std::log2(gs / (gs - own));
      double eav = 0.0;
      for (int l = 0; l < topo.secondary_ehrs; ++l) {
        const double le = pts[j].lambda_e[l][j];
        const double den = le - quad_form(slots[j].w_s[j], ch.g_el[l]);
        if (!(le > 0.0) || !(den > 0.0)) throw numeric_domain_error("oma eav ratio");
        eav = std::max(eav, std::log2(le / den));
      }
      return rate - eav;
    });
    add("C2[j=" + std::to_string(j) + "]", r / ns - reqs.gamma_s[j], tol.rate, rep.c2);
  }
  for (int t = 0; t < ns; ++t) {
    const CMatrix cbs = slots[t].cbs_total();
    for (int m = 0; m < topo.clusters; ++m)
      for (int i = 0; i < topo.pus_per_cluster[m]; ++i)
        add("C3[t=" + std::to_string(t) + ",m=" + std::to_string(m) + ",i=" + std::to_string(i) +
                "]",
            reqs.upsilon[m][i] - quad_form(cbs, ch.f_s[m][i]), tol.power, rep.c3);
  }
  for (int m = 0; m < topo.clusters; ++m)
    for (int k = 0; k < topo.ehrs_per_cluster[m]; ++k) {
      double avg = 0.0;
      for (int t = 0; t < ns; ++t)
        avg += harvested_power(std::max(0.0, primary_ehr_rf_power(ch, slots[t], m, k)), eh);
      add("C4[m=" + std::to_string(m) + ",k=" + std::to_string(k) + "]",
          avg / ns - reqs.zeta_primary, tol.power, rep.c4);
    }
  for (int l = 0; l < topo.secondary_ehrs; ++l) {
    double avg = 0.0;
    for (int t = 0; t < ns; ++t)
      avg += harvested_power(std::max(0.0, secondary_ehr_rf_power(ch, slots[t], l)), eh);
    add("C5[l=" + std::to_string(l) + "]", avg / ns - reqs.zeta_secondary, tol.power, rep.c5);
  }

  auto ratio = [](const CMatrix &w) {
    if (w.rows() < 2) return 0.0;
    const RVector ev = hermitian_eigenvalues(w);
    if (!(ev(0) > 0.0)) return 0.0;
    return std::max(0.0, ev(1)) / ev(0);
  };
  for (const auto &w : sol.w_p) rep.rank_ratios_wp.push_back(ratio(w));
  for (const auto &w : sol.w_s) rep.rank_ratios_ws.push_back(ratio(w));
  return rep;
}

}  // namespace secnoma
