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

#include "secnoma/metrics.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

namespace secnoma {

std::string format_double(double v) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

double log2_ratio(double num, double den, const char *what) {
  if (!(num > 0.0) || !(den > 0.0))
    throw numeric_domain_error(std::string("nonpositive ratio operand in ") + what);
  return std::log2(num / den);
}

}  // namespace

PowerTerms power_terms(const ChannelSet &ch, const CovarianceSolution &sol) {
  const auto &topo = ch.topology;
  if (static_cast<int>(sol.w_p.size()) != topo.clusters ||
      static_cast<int>(sol.w_s.size()) != topo.sus ||
      sol.w_p[0].rows() != topo.pbs_antennas || sol.w_s[0].rows() != topo.cbs_antennas)
    throw validation_error("power_terms: solution dimensions do not match topology");

  const CMatrix pbs_total = sol.pbs_total();
  const int ns = topo.sus;

  // CBS-side SIC tails: tail[j] = sum_{u >= j} W_s[u] + Sigma_s
  std::vector<CMatrix> tail(ns + 1);
  tail[ns] = sol.sigma_s;
  for (int j = ns - 1; j >= 0; --j) tail[j] = tail[j + 1] + sol.w_s[j];

  PowerTerms t;
  t.gamma_p.resize(topo.clusters);
  t.gamma_e.resize(topo.clusters);
  for (int m = 0; m < topo.clusters; ++m) {
    for (int i = 0; i < topo.pus_per_cluster[m]; ++i)
      t.gamma_p[m].push_back(quad_form(pbs_total, ch.h_p[m][i]) +
                             quad_form(tail[0], ch.f_s[m][i]) + ch.sigma2_p[m][i]);
    for (int k = 0; k < topo.ehrs_per_cluster[m]; ++k)
      t.gamma_e[m].push_back(quad_form(pbs_total, ch.g_emk[m][k]) +
                             quad_form(tail[0], ch.f_emk[m][k]));
  }
  for (int j = 0; j < ns; ++j)
    t.gamma_s.push_back(quad_form(pbs_total, ch.q_p[j]) +
                        quad_form(sol.w_s[j] + sol.sigma_s, ch.h_s[j]) + ch.sigma2_s[j]);

  t.lambda_e.resize(topo.secondary_ehrs);
  t.lambda_sl.resize(topo.secondary_ehrs);
  for (int l = 0; l < topo.secondary_ehrs; ++l) {
    const double pbs_part = quad_form(pbs_total, ch.q_el[l]);
    for (int j = 0; j < ns; ++j) {
      t.lambda_e[l].push_back(pbs_part + quad_form(sol.w_s[j] + sol.sigma_s, ch.g_el[l]) +
                              ch.sigma2_e_sec[l]);
      t.lambda_sl[l].push_back(pbs_part + quad_form(tail[j], ch.g_el[l]) + ch.sigma2_e_sec[l]);
    }
  }

  t.lambda_s.resize(ns);
  for (int j = 0; j < ns; ++j)
    for (int z = 0; z < ns; ++z)
      t.lambda_s[j].push_back(quad_form(pbs_total, ch.q_p[z]) +
                              quad_form(tail[j], ch.h_s[z]) + ch.sigma2_s[z]);

  return t;
}

double pu_secrecy_rate(const ChannelSet &ch, const PowerTerms &t, const CovarianceSolution &sol,
                       int m, int i) {
  const double gp = t.gamma_p[m][i];
  const double sig = quad_form(sol.w_p[m], ch.h_p[m][i]);
  const double legit = log2_ratio(gp, gp - sig, "pu legitimate ratio");

  double eav = 0.0;
  for (int k = 0; k < ch.topology.ehrs_per_cluster[m]; ++k) {
    const double ge = t.gamma_e[m][k];
    const double s2 = ch.sigma2_e_pri[m][k];
    const double leak = quad_form(sol.w_p[m], ch.g_emk[m][k]);
    eav = std::max(eav, log2_ratio(ge + s2, ge - leak + s2, "pu eavesdropper ratio"));
  }
  return legit - eav;
}

double su_secrecy_rate(const ChannelSet &ch, const PowerTerms &t, const CovarianceSolution &sol,
                       int j) {
  const int ns = ch.topology.sus;
  double legit;
  if (j == ns - 1) {
    const double gs = t.gamma_s[j];
    legit = log2_ratio(gs, gs - quad_form(sol.w_s[j], ch.h_s[j]), "su legitimate ratio");
  } else {
    legit = std::numeric_limits<double>::infinity();
    for (int z = j; z < ns; ++z) {
      const double ls = t.lambda_s[j][z];
      legit = std::min(legit, log2_ratio(ls, ls - quad_form(sol.w_s[j], ch.h_s[z]),
                                         "su decodability ratio"));
    }
  }

  double eav = 0.0;
  for (int l = 0; l < ch.topology.secondary_ehrs; ++l) {
    const double num = (j == ns - 1) ? t.lambda_e[l][j] : t.lambda_sl[l][j];
    const double leak = quad_form(sol.w_s[j], ch.g_el[l]);
    eav = std::max(eav, log2_ratio(num, num - leak, "su eavesdropper ratio"));
  }
  return legit - eav;
}

double harvested_power(double received_rf, const EhCircuitParams &eh) {
  if (received_rf < 0.0) throw validation_error("harvested_power: negative RF input");
  const double s = 1.0 / (1.0 + std::exp(-eh.a * (received_rf - eh.b)));
  const double psi = eh.psi();
  return eh.p_max * (s - psi) / (1.0 - psi);
}

double eh_rf_threshold(double zeta, const EhCircuitParams &eh) {
  if (!(zeta > 0.0)) throw validation_error("eh_rf_threshold: zeta must be positive");
  if (zeta >= eh.p_max)
    throw infeasible_requirement_error("eh_rf_threshold: zeta at or above saturation power");
  const double psi = eh.psi();
  const double inner = eh.p_max / (zeta * (1.0 - psi) + eh.p_max * psi) - 1.0;
  return eh.b - std::log(inner) / eh.a;
}

double primary_ehr_rf_power(const ChannelSet &ch, const CovarianceSolution &sol, int m, int k) {
  return quad_form(sol.pbs_total(), ch.g_emk[m][k]) + quad_form(sol.cbs_total(), ch.f_emk[m][k]);
}

double secondary_ehr_rf_power(const ChannelSet &ch, const CovarianceSolution &sol, int l) {
  return quad_form(sol.pbs_total(), ch.q_el[l]) + quad_form(sol.cbs_total(), ch.g_el[l]);
}

double total_power(const CovarianceSolution &sol) {
  double p = sol.sigma_s.trace().real();
  for (const auto &m : sol.w_p) p += m.trace().real();
  for (const auto &m : sol.sigma_p) p += m.trace().real();
  for (const auto &m : sol.w_s) p += m.trace().real();
  return p;
}

double FeasibilityReport::min_margin(const std::string &family) const {
  double lo = std::numeric_limits<double>::infinity();
  for (const auto &c : checks)
    if (c.id.rfind(family, 0) == 0) lo = std::min(lo, c.margin);
  return lo;
}

std::string FeasibilityReport::to_csv() const {
  std::ostringstream os;
  os << "constraint,margin,satisfied\n";
  for (const auto &c : checks)
    os << c.id << ',' << format_double(c.margin) << ',' << (c.satisfied ? 1 : 0) << '\n';
  return os.str();
}

FeasibilityReport verify_feasibility(const ChannelSet &ch, const CovarianceSolution &sol,
                                     const QosRequirements &reqs, const EhCircuitParams &eh,
                                     const FeasibilityTolerance &tol) {
  const auto &topo = ch.topology;
  FeasibilityReport rep;
  rep.c1 = rep.c2 = rep.c3 = rep.c4 = rep.c5 = true;
  const PowerTerms t = power_terms(ch, sol);
  const CMatrix cbs_total = sol.cbs_total();

  auto add = [&](const std::string &id, double margin, double tolerance, bool &family_ok) {
    ConstraintCheck c;
    c.id = id;
    c.margin = margin;
    c.satisfied = margin >= -tolerance;
    family_ok = family_ok && c.satisfied;
    rep.checks.push_back(std::move(c));
  };
  auto guarded_rate = [&](auto &&fn) {
    try {
      return fn();
    } catch (const numeric_domain_error &) {
      return -std::numeric_limits<double>::infinity();
    }
  };

  for (int m = 0; m < topo.clusters; ++m)
    for (int i = 0; i < topo.pus_per_cluster[m]; ++i) {
      const double r = guarded_rate([&] { return pu_secrecy_rate(ch, t, sol, m, i); });
      add("C1[m=" + std::to_string(m) + ",i=" + std::to_string(i) + "]",
          r - reqs.gamma_p[m][i], tol.rate, rep.c1);
    }
  for (int j = 0; j < topo.sus; ++j) {
    const double r = guarded_rate([&] { return su_secrecy_rate(ch, t, sol, j); });
    add("C2[j=" + std::to_string(j) + "]", r - reqs.gamma_s[j], tol.rate, rep.c2);
  }
  for (int m = 0; m < topo.clusters; ++m)
    for (int i = 0; i < topo.pus_per_cluster[m]; ++i)
      add("C3[m=" + std::to_string(m) + ",i=" + std::to_string(i) + "]",
          reqs.upsilon[m][i] - quad_form(cbs_total, ch.f_s[m][i]), tol.power, rep.c3);
  for (int m = 0; m < topo.clusters; ++m)
    for (int k = 0; k < topo.ehrs_per_cluster[m]; ++k) {
      const double rf = std::max(0.0, primary_ehr_rf_power(ch, sol, m, k));
      add("C4[m=" + std::to_string(m) + ",k=" + std::to_string(k) + "]",
          harvested_power(rf, eh) - reqs.zeta_primary, tol.power, rep.c4);
    }
  for (int l = 0; l < topo.secondary_ehrs; ++l) {
    const double rf = std::max(0.0, secondary_ehr_rf_power(ch, sol, l));
    add("C5[l=" + std::to_string(l) + "]", harvested_power(rf, eh) - reqs.zeta_secondary,
        tol.power, rep.c5);
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
