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

#include <string>
#include <vector>

#include "secnoma/model.hpp"
#include "secnoma/sca.hpp"

namespace secnoma {

enum class Scheme { noma_jamming, noma_nojam, oma_tdma };

const char *to_string(Scheme s);
Scheme scheme_from_string(const std::string &name);

// One scenario: topology, channel statistics, requirements, solver knobs.
// Defaults reproduce the reference simulation settings; a JSON file may
// override any subset. Powers are accepted in mW (suffix _mw) or dBm
// (suffix _dbm) and carried internally in watts.
struct ScenarioConfig {
  NetworkTopology topology;
  LinkVariances variances;
  NoiseFloors noise;
  double gamma_p = 2.0;            // bits/s/Hz, broadcast per PU
  double gamma_s = 1.0;            // bits/s/Hz, broadcast per SU
  double upsilon = mw_to_watts(10.0);
  double zeta_primary = mw_to_watts(15.0);
  double zeta_secondary = mw_to_watts(5.0);
  EhCircuitParams eh;
  SolverSettings solver;

  QosRequirements requirements() const;
  void validate() const;
};

enum class SweepKind { ehr_count, iterations, gamma_p };

const char *to_string(SweepKind k);

struct ExperimentConfig {
  ScenarioConfig scenario;
  SweepKind sweep = SweepKind::ehr_count;
  std::vector<double> sweep_values = {1, 2, 3, 4};
  int trials = 100;
  std::vector<Scheme> schemes = {Scheme::noma_jamming, Scheme::noma_nojam, Scheme::oma_tdma};
  std::uint64_t master_seed = 1;
  std::string output_dir = "out";
  int jobs = 0;  // 0: hardware concurrency

  void validate() const;
};

// Parses a scenario/experiment JSON file (missing file -> defaults would be
// an error; unknown keys are rejected to catch typos).
ExperimentConfig load_experiment_config(const std::string &path);
ExperimentConfig parse_experiment_config(const std::string &json_text);

// JSON echo of the effective configuration (for the metadata file).
std::string config_to_json(const ExperimentConfig &cfg);

}  // namespace secnoma
