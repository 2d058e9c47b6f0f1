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

#include "secnoma/sca.hpp"

namespace secnoma {

// Same pipeline with the CBS artificial-noise covariance pinned to zero.
ScaResult solve_no_jamming(const ChannelSet &channels, const QosRequirements &reqs,
                           const EhCircuitParams &eh, const SolverSettings &settings,
                           std::uint64_t rng_seed);

// Orthogonal baseline: the secondary frame is split into equal slots, slot j
// serving SU j alone (no superposition, no SIC). Primary secrecy and the
// interference cap hold in every slot, SU rates are scaled by the slot
// fraction, harvested power is averaged over slots, and the reported
// objective is the time-averaged transmit power. PBS covariances and the
// single AN covariance are shared across slots.
ScaResult solve_oma_tdma(const ChannelSet &channels, const QosRequirements &reqs,
                         const EhCircuitParams &eh, const SolverSettings &settings,
                         std::uint64_t rng_seed);

// Time-averaged transmit power of a slotted solution.
double oma_objective(const CovarianceSolution &sol);

// Covariances active during one slot: shared PBS + AN parts, single SU beam.
CovarianceSolution oma_slot_view(const CovarianceSolution &sol, int slot);

// Margin report in the slotted semantics (per-slot C1/C3, scaled C2,
// slot-averaged C4/C5).
FeasibilityReport verify_oma_feasibility(const ChannelSet &channels,
                                         const CovarianceSolution &sol,
                                         const QosRequirements &reqs, const EhCircuitParams &eh,
                                         const FeasibilityTolerance &tol = {});

}  // namespace secnoma
