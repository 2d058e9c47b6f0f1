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

#include <cstdint>
#include <vector>

#include "secnoma/common.hpp"

namespace secnoma {

// Counts and index sets of the two-tier network: a primary base station
// serving M multicast clusters (each with its own PUs and energy-harvesting
// receivers) and a cognitive base station serving NOMA SUs plus secondary
// EHRs. EHRs double as potential eavesdroppers of their own network.
struct NetworkTopology {
  int clusters = 2;                              // M
  std::vector<int> pus_per_cluster = {1, 1};     // per-cluster PU count
  std::vector<int> ehrs_per_cluster = {1, 1};    // per-cluster primary EHR count
  int sus = 3;                                   // secondary users (NOMA order)
  int secondary_ehrs = 2;                        // EHRs served by the CBS
  int pbs_antennas = 10;
  int cbs_antennas = 5;

  void validate() const;
  int total_pus() const;
  int total_primary_ehrs() const;
};

// Per-entry variances of the eight i.i.d. Rayleigh link classes.
struct LinkVariances {
  double pbs_pu = 2.0;    // PBS -> PU
  double cbs_pu = 0.5;    // CBS -> PU (cross-tier interference link)
  double pbs_su = 0.5;    // PBS -> SU (cross-tier interference link)
  double cbs_su = 2.0;    // CBS -> SU
  double pbs_pehr = 1.5;  // PBS -> primary EHR
  double cbs_pehr = 0.5;  // CBS -> primary EHR
  double pbs_sehr = 0.5;  // PBS -> secondary EHR
  double cbs_sehr = 1.5;  // CBS -> secondary EHR

  void validate() const;
};

// Receiver noise variances in watts.
struct NoiseFloors {
  double pu = dbm_to_watts(-120.0);
  double su = dbm_to_watts(-120.0);
  double primary_ehr = dbm_to_watts(-120.0);
  double secondary_ehr = dbm_to_watts(-120.0);

  void validate() const;
};

// Sigmoidal energy-harvesting circuit: steepness a (1/W), midpoint b (W),
// saturation power p_max (W).
struct EhCircuitParams {
  double a = 1500.0;
  double b = 0.0022;
  double p_max = mw_to_watts(24.0);

  void validate() const;
  // circuit constant 1/(1 + e^{a b})
  double psi() const { return 1.0 / (1.0 + std::exp(a * b)); }
};

// QoS and harvesting targets. Rates in bits/s/Hz, powers in watts.
struct QosRequirements {
  std::vector<std::vector<double>> gamma_p;  // min PU secrecy rate [m][i]
  std::vector<double> gamma_s;               // min SU secrecy rate [j]
  std::vector<std::vector<double>> upsilon;  // interference cap at PU [m][i]
  double zeta_primary = mw_to_watts(15.0);   // min harvested power, primary EHRs
  double zeta_secondary = mw_to_watts(5.0);  // min harvested power, secondary EHRs

  static QosRequirements uniform(const NetworkTopology &topo, double gamma_p_all,
                                 double gamma_s_all, double upsilon_all, double zeta1,
                                 double zeta2);
  void validate(const NetworkTopology &topo, const EhCircuitParams &eh) const;
};

// One fading realization: every channel vector of the network plus the
// per-receiver noise variances. Immutable after construction; SUs are
// relabeled so that |h_s[0]| <= |h_s[1]| <= ... (the NOMA decoding order).
struct ChannelSet {
  NetworkTopology topology;
  std::vector<std::vector<CVector>> h_p;    // PBS -> PU [m][i], length pbs_antennas
  std::vector<std::vector<CVector>> f_s;    // CBS -> PU [m][i], length cbs_antennas
  std::vector<CVector> q_p;                 // PBS -> SU [j]
  std::vector<CVector> h_s;                 // CBS -> SU [j]
  std::vector<std::vector<CVector>> g_emk;  // PBS -> primary EHR [m][k]
  std::vector<std::vector<CVector>> f_emk;  // CBS -> primary EHR [m][k]
  std::vector<CVector> q_el;                // PBS -> secondary EHR [l]
  std::vector<CVector> g_el;                // CBS -> secondary EHR [l]

  std::vector<std::vector<double>> sigma2_p;      // noise at PU [m][i]
  std::vector<double> sigma2_s;                   // noise at SU [j]
  std::vector<std::vector<double>> sigma2_e_pri;  // noise at primary EHR [m][k]
  std::vector<double> sigma2_e_sec;               // noise at secondary EHR [l]
};

ChannelSet generate_channels(std::uint64_t rng_seed, const NetworkTopology &topology,
                             const LinkVariances &variances, const NoiseFloors &noise);

// Rank-one outer products h h^H of every channel vector, used wherever powers
// are bilinear traces Tr(W h h^H).
struct OuterProducts {
  std::vector<std::vector<CMatrix>> h_p;    // [m][i]
  std::vector<std::vector<CMatrix>> f_s;    // [m][i]
  std::vector<CMatrix> q_p;                 // [j]
  std::vector<CMatrix> h_s;                 // [j]
  std::vector<std::vector<CMatrix>> g_emk;  // [m][k]
  std::vector<std::vector<CMatrix>> f_emk;  // [m][k]
  std::vector<CMatrix> q_el;                // [l]
  std::vector<CMatrix> g_el;                // [l]
};

OuterProducts outer_product_cache(const ChannelSet &channels);

// The decision variables: information covariances W and artificial-noise
// covariances Sigma for both stations. All Hermitian PSD.
struct CovarianceSolution {
  std::vector<CMatrix> w_p;      // [m], pbs_antennas square
  std::vector<CMatrix> sigma_p;  // [m]
  std::vector<CMatrix> w_s;      // [j], cbs_antennas square
  CMatrix sigma_s;

  static CovarianceSolution zero(const NetworkTopology &topo);

  // sum over clusters of W_p + Sigma_p
  CMatrix pbs_total() const;
  // sum over SUs of W_s plus Sigma_s
  CMatrix cbs_total() const;
  // sum of W_s over SUs j..end (SIC interference tail); j0 past the end gives
  // Sigma_s alone
  CMatrix cbs_tail(int j0) const;

  CovarianceSolution &operator+=(const CovarianceSolution &other);
  CovarianceSolution scaled(double factor) const;

  // min eigenvalue >= -tol_scale * trace for every matrix
  bool is_psd(double tol_scale = 1e-9) const;
};

}  // namespace secnoma
