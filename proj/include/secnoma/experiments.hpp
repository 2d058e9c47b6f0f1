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

#include "secnoma/baselines.hpp"
#include "secnoma/config.hpp"
#include "secnoma/extraction.hpp"

namespace secnoma {

// One pipeline run of one scheme on one channel draw.
struct RunRecord {
  std::string scheme;
  std::string sweep_param;  // ehr_count | gamma_p | iterations
  double sweep_value = 0.0;
  int trial = 0;
  std::uint64_t seed = 0;          // channel seed (shared across schemes)
  std::uint64_t channel_digest = 0;
  std::string status;              // converged | infeasible | failed
  std::optional<double> objective_w;  // present iff converged
  int iterations = 0;
  int restarts = 0;
  double max_rank_ratio = 0.0;
  bool extracted = false;
  // minimum margin per constraint family at the final solution (NaN when
  // there is no solution)
  double margin_c1 = 0.0, margin_c2 = 0.0, margin_c3 = 0.0, margin_c4 = 0.0, margin_c5 = 0.0;
  std::vector<double> trace;  // objective per round (exported in traces.csv)
  double wall_ms = 0.0;       // exported separately; not part of records.csv
  std::string message;
};

// Full pipeline for one scheme: SCA, beam recovery, margin verification.
// relaxed_out, when given, receives the relaxed covariance solution.
RunRecord run_scheme(Scheme scheme, const ChannelSet &ch, const QosRequirements &reqs,
                     const EhCircuitParams &eh, const SolverSettings &settings,
                     std::uint64_t seed,
                     const std::optional<CovarianceSolution> &anchor = std::nullopt,
                     CovarianceSolution *relaxed_out = nullptr);

// channel seed for a sweep cell; the same draw feeds every scheme
std::uint64_t channel_seed(std::uint64_t master_seed, int point, int trial);

std::uint64_t digest_channels(const ChannelSet &ch);

// Runs the whole sweep with a deterministic worker pool. Records are ordered
// by (point, trial, scheme position) regardless of scheduling.
std::vector<RunRecord> run_sweep(const ExperimentConfig &cfg);

struct SummaryPoint {
  std::string scheme;
  std::string sweep_param;
  double sweep_value = 0.0;
  int runs = 0;
  int converged = 0;
  double feasibility_rate = 0.0;
  double mean_w = 0.0;
  double median_w = 0.0;
  double ci_lo_w = 0.0;  // 95% bootstrap interval of the mean
  double ci_hi_w = 0.0;
};

// Aggregates over converged runs; pure function of the records (bootstrap
// resampling is seeded from the record set itself).
std::vector<SummaryPoint> summarize(const std::vector<RunRecord> &records);

// records.csv, summary.csv, timings.csv, traces.csv (iteration sweeps),
// metadata.json and an SVG plot. Everything except timings.csv is
// byte-deterministic for a given config + seed.
void export_results(const std::vector<RunRecord> &records,
                    const std::vector<SummaryPoint> &summary, const ExperimentConfig &cfg);

std::string records_csv_header();
std::string record_to_csv(const RunRecord &r);

}  // namespace secnoma
