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
#include <string>
#include <vector>

#include "secnoma/model.hpp"

namespace secnoma {

// Received-power bilinears for one covariance solution, all in watts.
//
// gamma_p[m][i]   total received power at PU (m,i), incl. noise
// gamma_e[m][k]   total received power at primary EHR (m,k), no noise term
// gamma_s[j]      power at SU j when only its own beam plus AN is active
//                 on the CBS side, incl. noise
// lambda_e[l][j]  power at secondary EHR l while decoding SU j's stream with
//                 only that stream plus AN active, incl. noise
// lambda_s[j][z]  power at SU z of the SIC stage for SU j (CBS tail j..Ns
//                 plus AN), incl. noise
// lambda_sl[l][j] power at secondary EHR l of the same SIC stage, incl. noise
struct PowerTerms {
  std::vector<std::vector<double>> gamma_p;
  std::vector<std::vector<double>> gamma_e;
  std::vector<double> gamma_s;
  std::vector<std::vector<double>> lambda_e;   // [l][j]
  std::vector<std::vector<double>> lambda_s;   // [j][z], z >= j meaningful
  std::vector<std::vector<double>> lambda_sl;  // [l][j]
};

PowerTerms power_terms(const ChannelSet &channels, const CovarianceSolution &sol);

// Secrecy rate of PU i in cluster m, bits/s/Hz; may be negative.
double pu_secrecy_rate(const ChannelSet &channels, const PowerTerms &terms,
                       const CovarianceSolution &sol, int m, int i);

// Worst-case secrecy rate of SU j, bits/s/Hz. For j < Ns the legitimate part
// is the minimum over the later-decoded users z in {j, ..., Ns}.
double su_secrecy_rate(const ChannelSet &channels, const PowerTerms &terms,
                       const CovarianceSolution &sol, int j);

// Sigmoidal harvested power for a given received RF power (both watts).
double harvested_power(double received_rf, const EhCircuitParams &eh);

// Minimum received RF power whose harvest meets zeta; exact inverse of
// harvested_power on (0, p_max).
double eh_rf_threshold(double zeta, const EhCircuitParams &eh);

// Received RF power available for harvesting (watts, noise excluded).
double primary_ehr_rf_power(const ChannelSet &channels, const CovarianceSolution &sol, int m,
                            int k);
double secondary_ehr_rf_power(const ChannelSet &channels, const CovarianceSolution &sol, int l);

// Objective of the design problem: total transmit power in watts.
double total_power(const CovarianceSolution &sol);

struct FeasibilityTolerance {
  double rate = 1e-6;    // bits/s/Hz
  double power = 1e-9;   // watts
};

struct ConstraintCheck {
  std::string id;      // e.g. "C1[m=0,i=0]"
  double margin = 0.0; // >= 0 satisfied (before tolerance)
  bool satisfied = false;
};

struct FeasibilityReport {
  std::vector<ConstraintCheck> checks;
  std::vector<double> rank_ratios_wp;  // second/first eigenvalue per W_p
  std::vector<double> rank_ratios_ws;  // per W_s
  bool c1 = false, c2 = false, c3 = false, c4 = false, c5 = false;

  bool all_satisfied() const { return c1 && c2 && c3 && c4 && c5; }
  double min_margin(const std::string &family) const;
  // one flat line per check: id,margin,satisfied
  std::string to_csv() const;
};

// Evaluates the margins of every design constraint at a candidate solution.
// Infeasibility is reported, never thrown. The rank condition is measured
// (eigenvalue ratio) but not pass/fail scored.
FeasibilityReport verify_feasibility(const ChannelSet &channels, const CovarianceSolution &sol,
                                     const QosRequirements &reqs, const EhCircuitParams &eh,
                                     const FeasibilityTolerance &tol = {});

}  // namespace secnoma
