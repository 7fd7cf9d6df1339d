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

#include "qzk/compilers/common.hpp"
#include "qzk/core/json_io.hpp"

namespace qzk {

inline constexpr const char* kProtocolSchema = "qzk.protocol/1";

/// Protocol files. Explicit form:
///   {"schema": "qzk.protocol/1", "name", "r_qubits", "w_qubits", "m_qubits",
///    "initial": [[re, im], ...] | "psi_v": [...], "coin_outcomes": [...],
///    "verifier": [[matrix, ...], ...], "honest": {"r_qubits", "rounds"}}
/// Generated form:
///   {"schema": "qzk.protocol/1", "generator": "random-perfect" | "random" |
///    "random-product", "rounds", "r_qubits", "w_qubits", "m_qubits", "seed"}
/// "psi_v" sets W and leaves R and M in |0>.
inline nlohmann::json protocol_to_json(const InteractiveProtocol& p) {
  using nlohmann::json;
  json j = {{"schema", kProtocolSchema}, {"name", p.name},           {"r_qubits", p.r_qubits},
            {"w_qubits", p.w_qubits},    {"m_qubits", p.m_qubits},   {"initial", io::to_json(p.initial)},
            {"coin_outcomes", p.coin_outcomes}};
  json ver = json::array();
  for (const auto& row : p.verifier) {
    json r = json::array();
    for (const auto& m : row) r.push_back(io::to_json(m));
    ver.push_back(r);
  }
  j["verifier"] = ver;
  if (p.honest) {
    json rounds = json::array();
    for (const auto& row : p.honest->rounds) {
      json r = json::array();
      for (const auto& m : row) r.push_back(io::to_json(m));
      rounds.push_back(r);
    }
    j["honest"] = {{"r_qubits", p.honest->r_qubits}, {"rounds", rounds}};
  }
  return j;
}

namespace detail {

inline int int_field(const nlohmann::json& j, const char* key, int fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number_integer()) throw ConfigError(where + "." + key + ": expected an integer");
  return j[key].get<int>();
}

inline std::vector<std::vector<Matrix>> matrix_rows(const nlohmann::json& j, const std::string& where) {
  if (!j.is_array()) throw ConfigError(where + ": expected an array of rounds");
  std::vector<std::vector<Matrix>> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto at = where + "[" + std::to_string(i) + "]";
    if (!j[i].is_array()) throw ConfigError(at + ": expected an array of matrices");
    std::vector<Matrix> row;
    for (std::size_t g = 0; g < j[i].size(); ++g) row.push_back(io::matrix_from_json(j[i][g], at + "[" + std::to_string(g) + "]"));
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace detail

inline InteractiveProtocol protocol_from_json(const nlohmann::json& j) {
  const std::string where = "protocol";
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  if (j.value("schema", "") != kProtocolSchema) throw ConfigError(where + ".schema: expected '" + std::string(kProtocolSchema) + "'");
  const int r = detail::int_field(j, "r_qubits", 1, where), w = detail::int_field(j, "w_qubits", 1, where),
            m = detail::int_field(j, "m_qubits", 1, where);
  if (j.contains("generator")) {
    const auto gen = j["generator"].get<std::string>();
    const int rounds = detail::int_field(j, "rounds", 2, where);
    Rng rng(static_cast<std::uint64_t>(j.value("seed", 0)));
    const std::string name = j.value("name", gen);
    if (gen == "random-perfect") return random_perfect_base(rng, rounds, r, w, m, name);
    if (gen == "random") return random_base(rng, rounds, r, w, m, false, name);
    if (gen == "random-product") return random_base(rng, rounds, r, w, m, true, name);
    throw ConfigError(where + ".generator: unknown generator '" + gen + "'");
  }
  InteractiveProtocol p;
  p.name = j.value("name", "protocol");
  p.r_qubits = r;
  p.w_qubits = w;
  p.m_qubits = m;
  if (j.contains("initial")) {
    p.initial = io::vector_from_json(j["initial"], where + ".initial");
  } else if (j.contains("psi_v")) {
    const Vector psi = io::vector_from_json(j["psi_v"], where + ".psi_v");
    if (static_cast<std::size_t>(psi.size()) != pow2(w)) throw ConfigError(where + ".psi_v: size is not 2^w_qubits");
    p.initial = kron(kron(basis_state(pow2(r), 0), psi), basis_state(pow2(m), 0));
  } else {
    throw ConfigError(where + ": needs 'initial' or 'psi_v'");
  }
  if (j.contains("coin_outcomes")) p.coin_outcomes = j["coin_outcomes"].get<std::vector<int>>();
  if (!j.contains("verifier")) throw ConfigError(where + ".verifier: missing");
  p.verifier = detail::matrix_rows(j["verifier"], where + ".verifier");
  if (j.contains("honest")) {
    ProverStrategy h;
    h.kind = ProverStrategy::Kind::Honest;
    h.label = "honest";
    h.r_qubits = detail::int_field(j["honest"], "r_qubits", r, where + ".honest");
    h.rounds = detail::matrix_rows(j["honest"].at("rounds"), where + ".honest.rounds");
    p.honest = std::move(h);
  }
  p.validate();
  return p;
}

}  // namespace qzk
