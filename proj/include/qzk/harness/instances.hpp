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

#include <string>

#include "qzk/core/json_io.hpp"
#include "qzk/crypto/commitment.hpp"
#include "qzk/pqma/pqma.hpp"
#include "qzk/uhlmann/uhlmann.hpp"

namespace qzk {

inline std::string schema_of(const nlohmann::json& j) { return j.is_object() ? j.value("schema", "") : ""; }

inline void require_schema(const nlohmann::json& j, const std::string& schema, const std::string& where) {
  if (schema_of(j) != schema) throw ConfigError(where + ".schema: expected '" + schema + "'");
}

/// {"schema": "qzk.pqma-instance/1", "name", "psi": vec, "witness": vec |
///  {"density": matrix}, "v": matrix, "yes": bool, "completeness_error"}
inline PqmaInstance pqma_instance_from_json(const nlohmann::json& j) {
  const std::string at = "instance";
  require_schema(j, "qzk.pqma-instance/1", at);
  const Vector psi = io::vector_from_json(j.at("psi"), at + ".psi");
  const int n = log2_exact(static_cast<std::size_t>(psi.size()));
  const auto& wj = j.at("witness");
  Matrix wm;
  if (wj.is_object()) {
    wm = io::matrix_from_json(wj.at("density"), at + ".witness.density");
  } else {
    const Vector wv = io::vector_from_json(wj, at + ".witness");
    wm = wv * wv.adjoint();
  }
  const MixedState witness(wm, RegisterLayout{{"w", log2_exact(static_cast<std::size_t>(wm.rows()))}});
  PqmaInstance inst{j.value("name", "pqma-instance"), PureState(psi, RegisterLayout{{"x", n}}), witness,
                    io::matrix_from_json(j.at("v"), at + ".v"), j.value("yes", true), j.value("completeness_error", 0.0)};
  inst.validate();
  return inst;
}

/// {"schema": "qzk.uhlmann-instance/1", "name", "r_qubits", "s_qubits",
///  "c": matrix, "d": matrix}; delta and gamma come from the experiment.
inline UhlmannInstance uhlmann_instance_from_json(const nlohmann::json& j) {
  const std::string at = "instance";
  require_schema(j, "qzk.uhlmann-instance/1", at);
  UhlmannInstance inst;
  inst.name = j.value("name", "uhlmann-instance");
  inst.r_qubits = j.at("r_qubits").get<int>();
  inst.s_qubits = j.at("s_qubits").get<int>();
  inst.c = io::matrix_from_json(j.at("c"), at + ".c");
  inst.d = io::matrix_from_json(j.at("d"), at + ".d");
  return inst;
}

inline nlohmann::json uhlmann_instance_to_json(const UhlmannInstance& inst) {
  return {{"schema", "qzk.uhlmann-instance/1"}, {"name", inst.name}, {"r_qubits", inst.r_qubits}, {"s_qubits", inst.s_qubits},
          {"c", io::to_json(inst.c)},          {"d", io::to_json(inst.d)}};
}

/// Built-in schemes by name.
inline CanonicalCommitment commitment_by_name(const std::string& name) {
  if (name == "identity") return identity_commitment(1);
  if (name == "bell") return bell_commitment(1);
  if (name == "cnot-chain") return cnot_chain_commitment();
  throw ConfigError("unknown commitment scheme '" + name + "'");
}

/// {"schema": "qzk.commitment/1", "name", "n", "lambda", "com": matrix,
///  "c_wires": [...], "d_wires": [...]}
inline CanonicalCommitment commitment_from_json(const nlohmann::json& j) {
  const std::string at = "instance";
  require_schema(j, "qzk.commitment/1", at);
  CanonicalCommitment c;
  c.name = j.value("name", "commitment");
  c.n = j.at("n").get<int>();
  c.lambda = j.at("lambda").get<int>();
  c.com = io::matrix_from_json(j.at("com"), at + ".com");
  c.c_wires = j.at("c_wires").get<std::vector<int>>();
  c.d_wires = j.at("d_wires").get<std::vector<int>>();
  c.validate();
  return c;
}

}  // namespace qzk
