// Copyright 2026 The qzk Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qzk/core/types.hpp"

namespace qzk {

inline constexpr const char* kExperimentSchema = "qzk.experiment/1";

inline const std::vector<std::string>& experiment_kinds() {
  static const std::vector<std::string> k{"core-check", "pqma", "collapse", "public-coin", "zk", "double-open", "mac", "uhlmann", "pipeline"};
  return k;
}

/// One tunable parameter of an experiment kind.
struct ParamSpec {
  enum class Type { Int, Real, Text, Bool, RealList };
  std::string name;
  Type type;
  nlohmann::json fallback;
  double lo = -1e300, hi = 1e300;
  std::string help;
};

/// Parameters accepted per kind, with defaults and ranges.
inline const std::vector<ParamSpec>& param_specs(const std::string& kind) {
  using T = ParamSpec::Type;
  static const std::vector<ParamSpec> none;
  static const std::vector<std::pair<std::string, std::vector<ParamSpec>>> table{
      {"core-check",
       {{"swap_pairs", T::Int, 1000, 1, 1e7, "random (rho, psi) pairs for the SWAP-test paths"},
        {"swap_max_qubits", T::Int, 3, 1, 3, "largest register in the SWAP-test pairs"},
        {"triples", T::Int, 10000, 1, 1e7, "random (rho, sigma, tau) triples"},
        {"gentle_pairs", T::Int, 10000, 1, 1e7, "random (rho, Pi) pairs"},
        {"max_dim", T::Int, 8, 2, 8, "largest dimension of the random states"},
        {"haar_samples", T::Int, 20000, 1, 1e7, "samples of the Haar first-moment check"}}},
      {"pqma",
       {{"instance", T::Text, "plus", 0, 0, "built-in no instance: plus | minus"},
        {"yes_instance", T::Text, "zero", 0, 0, "built-in yes instance: zero | one"},
        {"p", T::Int, 10000000, 2, 9e18, "prover copies"},
        {"q", T::Int, 60, 1, 1e6, "verifier copies"},
        {"family", T::Text, "all", 0, 0, "bad-witness | orthogonal-copies | planted-copies | rotated-copies | all"},
        {"sim_p", T::Int, 5, 2, 1e6, "prover copies in the simulator check"},
        {"sim_q", T::Int, 2, 1, 3, "verifier copies in the simulator check"},
        {"sim_inputs", T::Int, 8, 1, 1e4, "random corrupted-verifier inputs"}}},
      {"collapse",
       {{"bases", T::Int, 50, 1, 1e5, "random bases for the brute-force check"},
        {"perfect_bases", T::Int, 5, 1, 1e5, "perfect-completeness bases for the honest check"},
        {"r", T::Int, 2, 2, 3, "rounds of the perfect bases"},
        {"overlap_samples", T::Int, 20, 1, 1e5, "random strategies for the branch-overlap identity"},
        {"restarts", T::Int, 2, 1, 1000, "brute-force restarts"},
        {"iterations", T::Int, 100, 1, 1e6, "brute-force sweeps per restart"}}},
      {"public-coin",
       {{"verifiers", T::Int, 100, 1, 1e5, "random 3-message verifiers for the optimal-value cross-check"},
        {"max_w", T::Int, 2, 1, 2, "largest W register of the random verifiers"},
        {"bases", T::Int, 10, 1, 1e5, "random bases for the brute-force check"},
        {"restarts", T::Int, 4, 1, 1000, "brute-force restarts"},
        {"iterations", T::Int, 300, 1, 1e6, "brute-force sweeps per restart"}}},
      {"zk",
       {{"ell", T::Int, 3, 1, 4, "sequential runs"},
        {"biases", T::RealList, nlohmann::json::array({0.0, 0.25, 0.9, 1.0}), 0, 1, "corrupted-prover XOR input biases"},
        {"chi_p_min", T::Real, 0.01, 0, 1, "smallest acceptable chi-square p-value"}}},
      {"double-open",
       {{"scheme", T::Text, "bell", 0, 0, "binding scheme: bell | cnot-chain | identity"},
        {"broken_scheme", T::Text, "identity", 0, 0, "scheme expected to fail: identity"},
        {"random_adversaries", T::Int, 5, 0, 1000, "random adversaries against the binding scheme"},
        {"broken_threshold", T::Real, 0.6, 0, 1, "smallest win rate that counts as broken"}}},
      {"mac",
       {{"t", T::Int, 3, 1, 3, "trap qubits"},
        {"attack_wire", T::Int, 0, 0, 3, "wire the X attack hits"}}},
      {"uhlmann",
       {{"instances", T::Int, 100, 1, 1e5, "random instances for the residual check"},
        {"r_qubits", T::Int, 2, 1, 3, "R qubits of the random instances"},
        {"s_qubits", T::Int, 2, 1, 3, "S qubits of the random instances"},
        {"delta", T::Real, 2.0, 1e-3, 1e3, "soundness parameter"},
        {"gamma", T::Int, 32, 1, 1e5, "test-plus-target rounds"},
        {"enforce_gamma", T::Bool, true, 0, 0, "require gamma = 8 delta^2"},
        {"eps", T::Real, 0.02, 0, 3.2, "rotation angle of the perturbed prover"}}},
      {"pipeline",
       {{"r", T::Int, 2, 2, 2, "rounds of the base"},
        {"k", T::Int, 2, 1, 2, "parallel copies"},
        {"ell", T::Int, 2, 1, 4, "sequential runs of the final stage"},
        {"restarts", T::Int, 4, 1, 1000, "brute-force restarts"},
        {"iterations", T::Int, 300, 1, 1e6, "brute-force sweeps per restart"},
        {"spot_zeta", T::Real, 0.5, 0, 1, "zeta of the formula spot check"},
        {"spot_k", T::Int, 10, 1, 1000, "k of the formula spot check"}}},
  };
  for (const auto& [k, specs] : table)
    if (k == kind) return specs;
  return none;
}

/// Parsed experiment configuration:
///   {"schema": "qzk.experiment/1", "kind", "seed", "trials", "params": {},
///    "instance": path | object, "tolerance": {"exact", "bound"}, "output"}
struct ExperimentConfig {
  std::string kind;
  std::uint64_t seed = 0;
  std::int64_t trials = 10000;
  nlohmann::json params = nlohmann::json::object();
  nlohmann::json instance;  // resolved content, null when absent
  std::string instance_source;
  double tol_exact = 1e-9;
  double tol_bound = 1e-6;
  std::string output;

  /// Field-level problems; empty when valid.
  std::vector<std::string> problems() const {
    std::vector<std::string> out;
    const auto& kinds = experiment_kinds();
    if (std::find(kinds.begin(), kinds.end(), kind) == kinds.end()) {
      out.push_back("kind: unknown experiment kind '" + kind + "'");
      return out;
    }
    if (trials < 1) out.push_back("trials: must be at least 1");
    if (!(tol_exact > 0) || tol_exact > 1e-3) out.push_back("tolerance.exact: must be in (0, 1e-3]");
    if (!(tol_bound > 0) || tol_bound > 1e-2) out.push_back("tolerance.bound: must be in (0, 1e-2]");
    if (!params.is_object()) {
      out.push_back("params: expected an object");
      return out;
    }
    const auto& specs = param_specs(kind);
    for (const auto& [key, val] : params.items()) {
      const auto it = std::find_if(specs.begin(), specs.end(), [&](const ParamSpec& s) { return s.name == key; });
      const std::string f = "params." + key;
      if (it == specs.end()) {
        out.push_back(f + ": not a parameter of '" + kind + "'");
        continue;
      }
      using T = ParamSpec::Type;
      auto in_range = [&](double x) { return x >= it->lo && x <= it->hi; };
      auto num = [&](double x) {
        return it->type == ParamSpec::Type::Int ? std::to_string(static_cast<long long>(x)) : nlohmann::json(x).dump();
      };
      auto range = [&] { return " in [" + num(it->lo) + ", " + num(it->hi) + "]"; };
      switch (it->type) {
        case T::Int:
          if (!val.is_number_integer() || !in_range(val.get<double>())) out.push_back(f + ": expected an integer" + range());
          break;
        case T::Real:
          if (!val.is_number() || !in_range(val.get<double>())) out.push_back(f + ": expected a number" + range());
          break;
        case T::Text:
          if (!val.is_string()) out.push_back(f + ": expected a string");
          break;
        case T::Bool:
          if (!val.is_boolean()) out.push_back(f + ": expected true or false");
          break;
        case T::RealList:
          if (!val.is_array() || val.empty() ||
              std::any_of(val.begin(), val.end(), [&](const nlohmann::json& x) { return !x.is_number() || !in_range(x.get<double>()); }))
            out.push_back(f + ": expected a non-empty list of numbers" + range());
          break;
      }
    }
    if (out.empty() && kind == "pqma" && params.contains("p") && params.contains("q") && params["p"].is_number_integer() &&
        params["q"].is_number_integer() && params["p"].get<std::int64_t>() <= params["q"].get<std::int64_t>())
      out.push_back("params.p: must exceed params.q");
    if (out.empty() && kind == "uhlmann" && get_bool("enforce_gamma") && std::abs(get_int("gamma") - 8 * get_real("delta") * get_real("delta")) > 1e-9)
      out.push_back("params.gamma: must equal 8 delta^2 unless enforce_gamma is false");
    return out;
  }

  void validate() const {
    const auto p = problems();
    if (p.empty()) return;
    std::string msg = "invalid config:";
    for (const auto& s : p) msg += "\n  " + s;
    throw ConfigError(msg);
  }

  const nlohmann::json& param(const std::string& name) const {
    if (params.is_object() && params.contains(name)) return params[name];
    for (const auto& s : param_specs(kind))
      if (s.name == name) return s.fallback;
    throw ConfigError("params." + name + ": not a parameter of '" + kind + "'");
  }
  std::int64_t get_int(const std::string& name) const { return param(name).get<std::int64_t>(); }
  double get_real(const std::string& name) const { return param(name).get<double>(); }
  std::string get_text(const std::string& name) const { return param(name).get<std::string>(); }
  bool get_bool(const std::string& name) const { return param(name).get<bool>(); }
  std::vector<double> get_reals(const std::string& name) const { return param(name).get<std::vector<double>>(); }

  /// Every parameter with defaults filled in.
  nlohmann::json effective_params() const {
    nlohmann::json out = nlohmann::json::object();
    for (const auto& s : param_specs(kind)) out[s.name] = param(s.name);
    return out;
  }

  /// Config echo stored in records.
  nlohmann::json echo() const {
    nlohmann::json j = {{"schema", kExperimentSchema}, {"kind", kind},       {"seed", seed},
                        {"trials", trials},            {"params", effective_params()}, {"tolerance", {{"exact", tol_exact}, {"bound", tol_bound}}}};
    if (instance_source == "inline")
      j["instance"] = instance;
    else if (!instance_source.empty())
      j["instance"] = instance_source;
    return j;
  }

  /// Parses a config object. Relative instance paths resolve against base_dir.
  static ExperimentConfig from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {}) {
    std::vector<std::string> errs;
    ExperimentConfig c;
    if (!j.is_object()) throw ConfigError("invalid config:\n  <root>: expected an object");
    if (j.value("schema", "") != kExperimentSchema) errs.push_back("schema: expected '" + std::string(kExperimentSchema) + "'");
    static const std::vector<std::string> known{"schema", "kind", "seed", "trials", "params", "instance", "tolerance", "output"};
    for (const auto& [key, val] : j.items())
      if (std::find(known.begin(), known.end(), key) == known.end()) errs.push_back(key + ": unknown field");
    if (!j.contains("kind") || !j["kind"].is_string())
      errs.push_back("kind: missing or not a string");
    else
      c.kind = j["kind"].get<std::string>();
    if (j.contains("seed")) {
      if (!j["seed"].is_number_unsigned() && !(j["seed"].is_number_integer() && j["seed"].get<std::int64_t>() >= 0))
        errs.push_back("seed: expected a non-negative integer");
      else
        c.seed = j["seed"].get<std::uint64_t>();
    }
    if (j.contains("trials")) {
      if (!j["trials"].is_number_integer())
        errs.push_back("trials: expected an integer");
      else
        c.trials = j["trials"].get<std::int64_t>();
    }
    if (j.contains("params")) c.params = j["params"];
    if (j.contains("tolerance")) {
      const auto& t = j["tolerance"];
      if (!t.is_object()) {
        errs.push_back("tolerance: expected an object");
      } else {
        for (const auto& [key, val] : t.items()) {
          if (key != "exact" && key != "bound")
            errs.push_back("tolerance." + key + ": unknown field");
          else if (!val.is_number())
            errs.push_back("tolerance." + key + ": expected a number");
        }
        if (t.contains("exact") && t["exact"].is_number()) c.tol_exact = t["exact"].get<double>();
        if (t.contains("bound") && t["bound"].is_number()) c.tol_bound = t["bound"].get<double>();
      }
    }
    if (j.contains("output")) {
      if (!j["output"].is_string())
        errs.push_back("output: expected a path string");
      else
        c.output = j["output"].get<std::string>();
    }
    if (j.contains("instance")) {
      const auto& in = j["instance"];
      if (in.is_string()) {
        std::filesystem::path p = in.get<std::string>();
        if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
        c.instance_source = in.get<std::string>();
        std::ifstream f(p);
        if (!f) {
          errs.push_back("instance: cannot read '" + p.string() + "'");
        } else {
          try {
            c.instance = nlohmann::json::parse(f);
          } catch (const nlohmann::json::exception& e) {
            errs.push_back("instance: '" + p.string() + "' is not valid JSON (" + e.what() + ")");
          }
        }
      } else if (in.is_object()) {
        c.instance = in;
        c.instance_source = "inline";
      } else {
        errs.push_back("instance: expected a path or an object");
      }
    }
    if (!c.kind.empty())
      for (auto& s : c.problems()) errs.push_back(std::move(s));
    if (!errs.empty()) {
      std::string msg = "invalid config:";
      for (const auto& s : errs) msg += "\n  " + s;
      throw ConfigError(msg);
    }
    return c;
  }

  static ExperimentConfig load(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("invalid config:\n  <file>: cannot read '" + path.string() + "'");
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(f);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("invalid config:\n  <file>: '" + path.string() + "' is not valid JSON (" + e.what() + ")");
    }
    return from_json(j, path.parent_path());
  }

  /// Default config of a kind.
  static ExperimentConfig defaults(const std::string& kind, std::uint64_t seed = 0) {
    return from_json({{"schema", kExperimentSchema}, {"kind", kind}, {"seed", seed}});
  }
};

}  // namespace qzk
