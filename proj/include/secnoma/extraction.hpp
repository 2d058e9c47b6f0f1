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

#include <functional>

#include "secnoma/metrics.hpp"
#include "secnoma/model.hpp"

namespace secnoma {

// second/first eigenvalue of a Hermitian PSD matrix (0 for rank <= 1)
double rank_one_measure(const CMatrix &w);

// sqrt(lambda_1) * u_1; caller must have checked the rank measure
CVector principal_beamformer(const CMatrix &w);

// Beam vectors recovered from the relaxed covariances; AN covariances are
// carried through unchanged.
struct BeamformerSolution {
  std::vector<CVector> w_p;
  std::vector<CVector> w_s;
  std::vector<CMatrix> sigma_p;
  CMatrix sigma_s;

  CovarianceSolution to_covariances() const;
};

struct ExtractionOutcome {
  bool success = false;
  bool randomized = false;  // true when sampling was needed
  BeamformerSolution beams;
  CovarianceSolution covariances;  // rank-one reconstruction (when success)
  double power = 0.0;              // objective of the reconstruction
  double scale = 1.0;              // common power factor applied to the beams
  std::vector<double> rank_ratios;
  std::string message;
};

using FeasibilityFn = std::function<bool(const CovarianceSolution &)>;
using ObjectiveFn = std::function<double(const CovarianceSolution &)>;

// Shared recovery engine: principal eigenvectors where the rank test passes,
// Gaussian candidates where it fails, one common power factor restoring
// feasibility, smallest-power feasible candidate wins.
ExtractionOutcome extract_rank_one(const CovarianceSolution &relaxed, double rank_tolerance,
                                   int trials, std::uint64_t rng_seed,
                                   const FeasibilityFn &feasible, const ObjectiveFn &objective);

// Randomized recovery against the design constraints C1-C5.
ExtractionOutcome gaussian_randomization(const CovarianceSolution &relaxed,
                                         const ChannelSet &channels, const QosRequirements &reqs,
                                         const EhCircuitParams &eh, int trials,
                                         std::uint64_t rng_seed, double rank_tolerance = 1e-6);

}  // namespace secnoma
