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

#pragma once

#include <optional>

#include "secnoma/conic.hpp"
#include "secnoma/metrics.hpp"
#include "secnoma/model.hpp"

namespace secnoma {

// Tuning knobs of the successive convex approximation driver.
struct SolverSettings {
  double tolerance = 1e-4;      // watts; stop when |P_n - P_{n-1}| <= tolerance
  int max_iterations = 50;
  int restart_limit = 3;        // re-initializations after a first-round infeasibility
  double rank_tolerance = 1e-6; // eigenvalue-ratio gate for direct beam recovery
  int randomization_trials = 1000;
  std::string backend = "barrier";
  BarrierSettings barrier;
};

// Linearization state of one SCA round. Log-domain quantities are expressed
// relative to the local noise floor of the receiver they describe, which
// keeps the subproblem coefficients well scaled; caps (eavesdropper SNR-ratio
// bounds) are dimensionless.
//
// The fields double as (a) the tilde linearization points consumed by the
// subproblem builder and (b) the record of the latest optimal auxiliary
// values, since the update rule sets the former to the latter.
struct ScaIterate {
  // primary clusters
  std::vector<std::vector<double>> pu_log_interf;     // [m][i]
  std::vector<std::vector<double>> pu_log_total;      // [m][i]
  std::vector<double> pu_cap;                         // [m]
  std::vector<double> pu_log_cap_hi;                  // [m]
  std::vector<double> pu_log_cap_lo;                  // [m]
  std::vector<std::vector<double>> pu_eav_log_total;  // [m][k]
  std::vector<std::vector<double>> pu_eav_log_interf; // [m][k]
  // strongest SU
  double su_log_interf = 0.0, su_log_total = 0.0;
  double su_cap = 1.0, su_log_cap_hi = 0.0, su_log_cap_lo = 0.0;
  std::vector<double> su_eav_log_total;   // [l]
  std::vector<double> su_eav_log_interf;  // [l]
  // weaker SUs (decoded by every later user)
  std::vector<double> sic_sinr_floor;      // [j] ratio floor
  std::vector<double> sic_eav_cap;         // [j]
  std::vector<double> sic_log_sinr_floor;  // [j]
  std::vector<double> sic_log_eav_cap;     // [j]
  std::vector<std::vector<double>> sic_log_interf;      // [j][z-j]
  std::vector<std::vector<double>> sic_log_total;       // [j][z-j]
  std::vector<std::vector<double>> sic_eav_log_total;   // [l][j]
  std::vector<std::vector<double>> sic_eav_log_interf;  // [l][j]

  CovarianceSolution anchor;  // point the logs were evaluated at

  bool all_finite() const;
};

// Evaluates every auxiliary quantity with equality at a covariance solution.
ScaIterate compute_iterate_at(const ChannelSet &channels, const CovarianceSolution &sol);

struct init_infeasible_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Deterministic initialization: isotropic covariances with a doubling power
// search meeting the interference cap and the harvesting thresholds, then
// tilde points evaluated with equality. Restarts perturb the isotropic shape.
ScaIterate initialize_iterate(const ChannelSet &channels, const QosRequirements &reqs,
                              const EhCircuitParams &eh, std::uint64_t rng_seed,
                              int restart = 0);

// Variable layout of one convex subproblem.
struct VarMap {
  int npt = 0, nst = 0, clusters = 0, sus = 0;
  bool with_an = true;
  std::vector<int> wp_off, sp_off, ws_off;
  int ss_off = -1;
  int nvars = 0;

  std::vector<std::vector<int>> pu_log_interf, pu_log_total;
  std::vector<int> pu_cap, pu_log_cap_hi, pu_log_cap_lo;  // -1 when cluster unobserved
  std::vector<std::vector<int>> pu_eav_log_total, pu_eav_log_interf;
  int su_log_interf = -1, su_log_total = -1;
  int su_cap = -1, su_log_cap_hi = -1, su_log_cap_lo = -1;
  std::vector<int> su_eav_log_total, su_eav_log_interf;
  std::vector<int> sic_sinr_floor, sic_eav_cap, sic_log_sinr_floor, sic_log_eav_cap;
  std::vector<std::vector<int>> sic_log_interf, sic_log_total;
  std::vector<std::vector<int>> sic_eav_log_total, sic_eav_log_interf;

  RVector encode(const ScaIterate &it) const;
  void decode(const RVector &x, CovarianceSolution &sol, ScaIterate &it) const;
};

struct ConvexSubproblem {
  ConicProgram program;
  VarMap map;
  RVector start;  // linearization anchor in program coordinates
};

struct BuildOptions {
  bool with_an = true;  // false removes the CBS artificial-noise covariance
};

// Emits the conic inner approximation of the design problem at the given
// linearization point: affine + exponential rows over the PSD covariance
// blocks, rank constraints dropped.
ConvexSubproblem build_subproblem(const ChannelSet &channels, const QosRequirements &reqs,
                                  const EhCircuitParams &eh, const ScaIterate &iterate,
                                  const BuildOptions &opts = {});

struct SubproblemSolution {
  SolveStatus status = SolveStatus::numeric_failure;
  CovarianceSolution sol;
  ScaIterate aux;       // optimal auxiliary values; anchor = sol
  double objective = 0.0;
  int newton_steps = 0;
  RVector interior_hint;  // deep interior iterate for the next round's warm start
  double interior_hint_t = 0.0;
  std::string message;
};

// warm, when given and compatible, replaces the anchor as the solver start
SubproblemSolution solve_subproblem(const ConvexSubproblem &prob, const SolverSettings &settings,
                                    const RVector *warm = nullptr);

// Next linearization point from an optimal round (identity at a fixed point).
ScaIterate update_iterate(const SubproblemSolution &solution);

struct ScaResult {
  enum class Status { converged, not_converged, infeasible, failed };
  Status status = Status::failed;
  bool converged = false;
  CovarianceSolution relaxed;
  double objective = 0.0;
  std::vector<double> trace;  // objective after each round
  int iterations = 0;
  int restarts = 0;
  std::string message;

  bool has_solution() const {
    return status == Status::converged || status == Status::not_converged;
  }
};

struct ScaOptions {
  bool with_an = true;
  // optional warm anchor replacing the isotropic initialization (used by the
  // paired multi-start policy); falls back to the standard path on failure
  std::optional<CovarianceSolution> anchor;
};

ScaResult run_sca(const ChannelSet &channels, const QosRequirements &reqs,
                  const EhCircuitParams &eh, const SolverSettings &settings,
                  std::uint64_t rng_seed, const ScaOptions &opts = {});

}  // namespace secnoma
