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

#include "secnoma/extraction.hpp"

#include <cmath>

namespace secnoma {

double rank_one_measure(const CMatrix &w) {
  const double scale = std::max(w.cwiseAbs().maxCoeff(), 1e-300);
  if ((w - w.adjoint()).cwiseAbs().maxCoeff() > 1e-9 * scale)
    throw validation_error("rank_one_measure: input is not Hermitian");
  if (w.rows() < 2) return 0.0;
  const RVector ev = hermitian_eigenvalues(w);
  if (!(ev(0) > 0.0)) return 0.0;
  return std::max(0.0, ev(1)) / ev(0);
}

CVector principal_beamformer(const CMatrix &w) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(w);
  const int last = static_cast<int>(w.rows()) - 1;
  const double lead = std::max(es.eigenvalues()(last), 0.0);
  return std::sqrt(lead) * es.eigenvectors().col(last);
}

CovarianceSolution BeamformerSolution::to_covariances() const {
  CovarianceSolution sol;
  for (const auto &w : w_p) sol.w_p.push_back(w * w.adjoint());
  sol.sigma_p = sigma_p;
  for (const auto &w : w_s) sol.w_s.push_back(w * w.adjoint());
  sol.sigma_s = sigma_s;
  return sol;
}

namespace {

struct Candidate {
  std::vector<CVector> w_p;
  std::vector<CVector> w_s;
};

CovarianceSolution assemble(const CovarianceSolution &relaxed, const Candidate &c, double theta) {
  CovarianceSolution sol;
  for (const auto &w : c.w_p) sol.w_p.push_back(theta * (w * w.adjoint()));
  sol.sigma_p = relaxed.sigma_p;
  for (const auto &w : c.w_s) sol.w_s.push_back(theta * (w * w.adjoint()));
  sol.sigma_s = relaxed.sigma_s;
  return sol;
}

// square root factor via eigendecomposition, negatives clipped
CMatrix psd_sqrt(const CMatrix &w) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(w);
  RVector ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace

ExtractionOutcome extract_rank_one(const CovarianceSolution &relaxed, double rank_tolerance,
                                   int trials, std::uint64_t rng_seed,
                                   const FeasibilityFn &feasible, const ObjectiveFn &objective) {
  ExtractionOutcome out;
  std::vector<double> ratios;
  bool all_rank_one = true;
  for (const auto &w : relaxed.w_p) {
    ratios.push_back(rank_one_measure(w));
    all_rank_one = all_rank_one && ratios.back() <= rank_tolerance;
  }
  for (const auto &w : relaxed.w_s) {
    ratios.push_back(rank_one_measure(w));
    all_rank_one = all_rank_one && ratios.back() <= rank_tolerance;
  }
  out.rank_ratios = ratios;

  Candidate principal;
  for (const auto &w : relaxed.w_p) principal.w_p.push_back(principal_beamformer(w));
  for (const auto &w : relaxed.w_s) principal.w_s.push_back(principal_beamformer(w));

  if (all_rank_one) {
    // direct recovery; a sliver of extra power compensates the discarded
    // trailing eigenvalue mass if it happens to bite
    for (double theta : {1.0, 1.0 + 1e-9, 1.0 + 1e-7, 1.0 + 1e-5, 1.0 + 1e-3}) {
      CovarianceSolution sol = assemble(relaxed, principal, theta);
      if (feasible(sol)) {
        out.success = true;
        out.scale = theta;
        out.covariances = std::move(sol);
        out.beams.w_p = principal.w_p;
        out.beams.w_s = principal.w_s;
        const double rt = std::sqrt(theta);
        for (auto &w : out.beams.w_p) w *= rt;
        for (auto &w : out.beams.w_s) w *= rt;
        out.beams.sigma_p = relaxed.sigma_p;
        out.beams.sigma_s = relaxed.sigma_s;
        out.power = objective(out.covariances);
        return out;
      }
    }
    out.message = "rank-one reconstruction lost feasibility";
    return out;
  }

  // Gaussian randomization for the matrices that failed the rank test
  out.randomized = true;
  if (trials <= 0) {
    out.message = "randomization requested with zero trials";
    return out;
  }
  Rng rng(seed_combine(rng_seed, 0xbea7f0a3ULL));
  std::vector<CMatrix> root_p, root_s;
  for (const auto &w : relaxed.w_p) root_p.push_back(psd_sqrt(w));
  for (const auto &w : relaxed.w_s) root_s.push_back(psd_sqrt(w));

  double best_power = std::numeric_limits<double>::infinity();
  for (int t = 0; t < trials; ++t) {
    Candidate c;
    size_t r = 0;
    for (size_t m = 0; m < relaxed.w_p.size(); ++m, ++r)
      c.w_p.push_back(ratios[r] <= rank_tolerance
                          ? principal.w_p[m]
                          : CVector(root_p[m] * rng.cgauss_vector(
                                                    static_cast<int>(relaxed.w_p[m].rows()), 1.0)));
    for (size_t j = 0; j < relaxed.w_s.size(); ++j, ++r)
      c.w_s.push_back(ratios[r] <= rank_tolerance
                          ? principal.w_s[j]
                          : CVector(root_s[j] * rng.cgauss_vector(
                                                    static_cast<int>(relaxed.w_s[j].rows()), 1.0)));

    // smallest common power factor restoring feasibility: coarse geometric
    // scan, then bisection against the lower edge of the feasible bracket
    const double theta_hi = 64.0, theta_lo = 1.0 / 64.0;
    double found = -1.0, prev = 0.0;
    const int grid = 49;
    for (int g = 0; g < grid; ++g) {
      const double theta = theta_lo * std::pow(theta_hi / theta_lo, g / double(grid - 1));
      if (feasible(assemble(relaxed, c, theta))) {
        found = theta;
        break;
      }
      prev = theta;
    }
    if (found < 0.0) continue;
    double lo = prev, hi = found;
    for (int b = 0; b < 40 && lo > 0.0; ++b) {
      const double mid = 0.5 * (lo + hi);
      if (feasible(assemble(relaxed, c, mid)))
        hi = mid;
      else
        lo = mid;
    }
    CovarianceSolution sol = assemble(relaxed, c, hi);
    const double power = objective(sol);
    if (power < best_power) {
      best_power = power;
      out.success = true;
      out.scale = hi;
      out.covariances = std::move(sol);
      out.beams.w_p = c.w_p;
      out.beams.w_s = c.w_s;
      const double rt = std::sqrt(hi);
      for (auto &w : out.beams.w_p) w *= rt;
      for (auto &w : out.beams.w_s) w *= rt;
      out.beams.sigma_p = relaxed.sigma_p;
      out.beams.sigma_s = relaxed.sigma_s;
      out.power = power;
    }
  }
  if (!out.success) out.message = "no feasible candidate within the trial budget";
  return out;
}

ExtractionOutcome gaussian_randomization(const CovarianceSolution &relaxed, const ChannelSet &ch,
                                         const QosRequirements &reqs, const EhCircuitParams &eh,
                                         int trials, std::uint64_t rng_seed,
                                         double rank_tolerance) {
  // slightly tightened internal margins so downstream verification at the
  // exported tolerances has headroom
  const FeasibilityTolerance tight{1e-9, 1e-12};
  auto feasible = [&](const CovarianceSolution &sol) {
    return verify_feasibility(ch, sol, reqs, eh, tight).all_satisfied();
  };
  auto objective = [](const CovarianceSolution &sol) { return total_power(sol); };
  return extract_rank_one(relaxed, rank_tolerance, trials, rng_seed, feasible, objective);
}

}  // namespace secnoma
