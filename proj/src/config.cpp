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

#include "secnoma/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace secnoma {

using nlohmann::json;

const char *to_string(Scheme s) {
  switch (s) {
    case Scheme::noma_jamming: return "noma-jamming";
    case Scheme::noma_nojam: return "noma-nojam";
    default: return "oma-tdma";
  }
}

Scheme scheme_from_string(const std::string &name) {
  if (name == "noma-jamming") return Scheme::noma_jamming;
  if (name == "noma-nojam") return Scheme::noma_nojam;
  if (name == "oma-tdma") return Scheme::oma_tdma;
  throw validation_error("unknown scheme: " + name);
}

const char *to_string(SweepKind k) {
  switch (k) {
    case SweepKind::ehr_count: return "ehr_count";
    case SweepKind::iterations: return "iterations";
    default: return "gamma_p";
  }
}

QosRequirements ScenarioConfig::requirements() const {
  return QosRequirements::uniform(topology, gamma_p, gamma_s, upsilon, zeta_primary,
                                  zeta_secondary);
}

void ScenarioConfig::validate() const {
  topology.validate();
  variances.validate();
  noise.validate();
  eh.validate();
  requirements().validate(topology, eh);
  if (!(solver.tolerance > 0.0)) throw validation_error("solver.tolerance_w must be positive");
  if (solver.max_iterations < 1) throw validation_error("solver.max_iterations must be >= 1");
}

void ExperimentConfig::validate() const {
  scenario.validate();
  if (trials < 1) throw validation_error("experiment.trials must be >= 1");
  if (schemes.empty()) throw validation_error("experiment.schemes must not be empty");
  if (sweep != SweepKind::iterations) {
    if (sweep_values.empty()) throw validation_error("experiment sweep values must not be empty");
    for (size_t i = 1; i < sweep_values.size(); ++i)
      if (!(sweep_values[i] > sweep_values[i - 1]))
        throw validation_error("experiment sweep values must be strictly increasing");
  }
  if (sweep == SweepKind::ehr_count)
    for (double v : sweep_values)
      if (v < 0 || v != std::floor(v))
        throw validation_error("ehr_count sweep values must be nonnegative integers");
}

namespace {

void reject_unknown(const json &j, std::initializer_list<const char *> known,
                    const std::string &where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char *k : known) ok = ok || it.key() == k;
    if (!ok) throw validation_error("unknown key '" + it.key() + "' in " + where);
  }
}

template <typename T>
void maybe(const json &j, const char *key, T &out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

void maybe_power(const json &j, const std::string &base, double &watts) {
  const std::string mw = base + "_mw", dbm = base + "_dbm", w = base + "_w";
  int found = j.contains(mw) + j.contains(dbm) + j.contains(w);
  if (found > 1) throw validation_error("conflicting units for " + base);
  if (j.contains(mw)) watts = mw_to_watts(j.at(mw).get<double>());
  if (j.contains(dbm)) watts = dbm_to_watts(j.at(dbm).get<double>());
  if (j.contains(w)) watts = j.at(w).get<double>();
}

}  // namespace

ExperimentConfig parse_experiment_config(const std::string &text) {
  ExperimentConfig cfg;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception &e) {
    throw validation_error(std::string("config parse error: ") + e.what());
  }
  reject_unknown(j, {"topology", "variances", "noise_dbm", "qos", "eh", "solver", "experiment"},
                 "config root");

  if (j.contains("topology")) {
    const json &t = j.at("topology");
    reject_unknown(t,
                   {"clusters", "pus_per_cluster", "ehrs_per_cluster", "sus", "secondary_ehrs",
                    "pbs_antennas", "cbs_antennas"},
                   "topology");
    auto &topo = cfg.scenario.topology;
    maybe(t, "clusters", topo.clusters);
    if (t.contains("pus_per_cluster")) topo.pus_per_cluster = t.at("pus_per_cluster").get<std::vector<int>>();
    if (t.contains("ehrs_per_cluster")) topo.ehrs_per_cluster = t.at("ehrs_per_cluster").get<std::vector<int>>();
    // keep per-cluster lists in step with a plain cluster-count override
    if (t.contains("clusters") && !t.contains("pus_per_cluster"))
      topo.pus_per_cluster.assign(topo.clusters, 1);
    if (t.contains("clusters") && !t.contains("ehrs_per_cluster"))
      topo.ehrs_per_cluster.assign(topo.clusters, 1);
    maybe(t, "sus", topo.sus);
    maybe(t, "secondary_ehrs", topo.secondary_ehrs);
    maybe(t, "pbs_antennas", topo.pbs_antennas);
    maybe(t, "cbs_antennas", topo.cbs_antennas);
  }
  if (j.contains("variances")) {
    const json &v = j.at("variances");
    reject_unknown(v, {"pbs_pu", "cbs_pu", "pbs_su", "cbs_su", "pbs_pehr", "cbs_pehr", "pbs_sehr",
                       "cbs_sehr"},
                   "variances");
    auto &lv = cfg.scenario.variances;
    maybe(v, "pbs_pu", lv.pbs_pu);
    maybe(v, "cbs_pu", lv.cbs_pu);
    maybe(v, "pbs_su", lv.pbs_su);
    maybe(v, "cbs_su", lv.cbs_su);
    maybe(v, "pbs_pehr", lv.pbs_pehr);
    maybe(v, "cbs_pehr", lv.cbs_pehr);
    maybe(v, "pbs_sehr", lv.pbs_sehr);
    maybe(v, "cbs_sehr", lv.cbs_sehr);
  }
  if (j.contains("noise_dbm")) {
    const json &n = j.at("noise_dbm");
    reject_unknown(n, {"pu", "su", "primary_ehr", "secondary_ehr", "all"}, "noise_dbm");
    auto &nf = cfg.scenario.noise;
    if (n.contains("all")) {
      const double w = dbm_to_watts(n.at("all").get<double>());
      nf.pu = nf.su = nf.primary_ehr = nf.secondary_ehr = w;
    }
    if (n.contains("pu")) nf.pu = dbm_to_watts(n.at("pu").get<double>());
    if (n.contains("su")) nf.su = dbm_to_watts(n.at("su").get<double>());
    if (n.contains("primary_ehr")) nf.primary_ehr = dbm_to_watts(n.at("primary_ehr").get<double>());
    if (n.contains("secondary_ehr"))
      nf.secondary_ehr = dbm_to_watts(n.at("secondary_ehr").get<double>());
  }
  if (j.contains("qos")) {
    const json &q = j.at("qos");
    reject_unknown(q,
                   {"gamma_p", "gamma_s", "upsilon_mw", "upsilon_dbm", "upsilon_w",
                    "zeta_primary_mw", "zeta_primary_dbm", "zeta_primary_w", "zeta_secondary_mw",
                    "zeta_secondary_dbm", "zeta_secondary_w"},
                   "qos");
    maybe(q, "gamma_p", cfg.scenario.gamma_p);
    maybe(q, "gamma_s", cfg.scenario.gamma_s);
    maybe_power(q, "upsilon", cfg.scenario.upsilon);
    maybe_power(q, "zeta_primary", cfg.scenario.zeta_primary);
    maybe_power(q, "zeta_secondary", cfg.scenario.zeta_secondary);
  }
  if (j.contains("eh")) {
    const json &e = j.at("eh");
    reject_unknown(e, {"a", "b_w", "b_mw", "b_dbm", "p_max_mw", "p_max_dbm", "p_max_w"}, "eh");
    maybe(e, "a", cfg.scenario.eh.a);
    maybe_power(e, "b", cfg.scenario.eh.b);
    maybe_power(e, "p_max", cfg.scenario.eh.p_max);
  }
  if (j.contains("solver")) {
    const json &s = j.at("solver");
    reject_unknown(s,
                   {"tolerance_w", "max_iterations", "restart_limit", "rank_tolerance",
                    "randomization_trials", "backend", "barrier_gap_abs"},
                   "solver");
    auto &sv = cfg.scenario.solver;
    maybe(s, "tolerance_w", sv.tolerance);
    maybe(s, "max_iterations", sv.max_iterations);
    maybe(s, "restart_limit", sv.restart_limit);
    maybe(s, "rank_tolerance", sv.rank_tolerance);
    maybe(s, "randomization_trials", sv.randomization_trials);
    maybe(s, "backend", sv.backend);
    maybe(s, "barrier_gap_abs", sv.barrier.gap_abs);
  }
  if (j.contains("experiment")) {
    const json &e = j.at("experiment");
    reject_unknown(e, {"schemes", "trials", "sweep", "master_seed", "output_dir", "jobs"},
                   "experiment");
    if (e.contains("schemes")) {
      cfg.schemes.clear();
      for (const auto &s : e.at("schemes")) cfg.schemes.push_back(scheme_from_string(s.get<std::string>()));
    }
    maybe(e, "trials", cfg.trials);
    maybe(e, "master_seed", cfg.master_seed);
    maybe(e, "output_dir", cfg.output_dir);
    maybe(e, "jobs", cfg.jobs);
    if (e.contains("sweep")) {
      const json &sw = e.at("sweep");
      reject_unknown(sw, {"kind", "values"}, "experiment.sweep");
      const std::string kind = sw.value("kind", "ehr_count");
      if (kind == "ehr_count")
        cfg.sweep = SweepKind::ehr_count;
      else if (kind == "iterations")
        cfg.sweep = SweepKind::iterations;
      else if (kind == "gamma_p")
        cfg.sweep = SweepKind::gamma_p;
      else
        throw validation_error("unknown sweep kind: " + kind);
      if (sw.contains("values")) cfg.sweep_values = sw.at("values").get<std::vector<double>>();
    }
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_experiment_config(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw validation_error("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_experiment_config(ss.str());
}

std::string config_to_json(const ExperimentConfig &cfg) {
  const auto &sc = cfg.scenario;
  json j;
  j["topology"] = {{"clusters", sc.topology.clusters},
                   {"pus_per_cluster", sc.topology.pus_per_cluster},
                   {"ehrs_per_cluster", sc.topology.ehrs_per_cluster},
                   {"sus", sc.topology.sus},
                   {"secondary_ehrs", sc.topology.secondary_ehrs},
                   {"pbs_antennas", sc.topology.pbs_antennas},
                   {"cbs_antennas", sc.topology.cbs_antennas}};
  j["variances"] = {{"pbs_pu", sc.variances.pbs_pu},   {"cbs_pu", sc.variances.cbs_pu},
                    {"pbs_su", sc.variances.pbs_su},   {"cbs_su", sc.variances.cbs_su},
                    {"pbs_pehr", sc.variances.pbs_pehr}, {"cbs_pehr", sc.variances.cbs_pehr},
                    {"pbs_sehr", sc.variances.pbs_sehr}, {"cbs_sehr", sc.variances.cbs_sehr}};
  j["noise_dbm"] = {{"pu", watts_to_dbm(sc.noise.pu)},
                    {"su", watts_to_dbm(sc.noise.su)},
                    {"primary_ehr", watts_to_dbm(sc.noise.primary_ehr)},
                    {"secondary_ehr", watts_to_dbm(sc.noise.secondary_ehr)}};
  j["qos"] = {{"gamma_p", sc.gamma_p},
              {"gamma_s", sc.gamma_s},
              {"upsilon_mw", watts_to_mw(sc.upsilon)},
              {"zeta_primary_mw", watts_to_mw(sc.zeta_primary)},
              {"zeta_secondary_mw", watts_to_mw(sc.zeta_secondary)}};
  j["eh"] = {{"a", sc.eh.a}, {"b_w", sc.eh.b}, {"p_max_mw", watts_to_mw(sc.eh.p_max)}};
  j["solver"] = {{"tolerance_w", sc.solver.tolerance},
                 {"max_iterations", sc.solver.max_iterations},
                 {"restart_limit", sc.solver.restart_limit},
                 {"rank_tolerance", sc.solver.rank_tolerance},
                 {"randomization_trials", sc.solver.randomization_trials},
                 {"backend", sc.solver.backend},
                 {"barrier_gap_abs", sc.solver.barrier.gap_abs}};
  std::vector<std::string> scheme_names;
  for (Scheme s : cfg.schemes) scheme_names.emplace_back(to_string(s));
  j["experiment"] = {{"schemes", scheme_names},
                     {"trials", cfg.trials},
                     {"sweep", {{"kind", to_string(cfg.sweep)}, {"values", cfg.sweep_values}}},
                     {"master_seed", cfg.master_seed},
                     {"output_dir", cfg.output_dir},
                     {"jobs", cfg.jobs}};
  return j.dump(2);
}

}  // namespace secnoma
