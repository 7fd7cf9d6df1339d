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

// Complex data as JSON: a vector is [[re, im], ...]; a matrix is a list of
// rows in row-major order. Plain numbers are accepted as real entries.

#pragma once

#include <string>

#include "json.hpp"
#include "qzk/core/state.hpp"

namespace qzk::io {

using json = nlohmann::json;

inline json to_json(cplx z) { return json::array({z.real(), z.imag()}); }

inline cplx complex_from_json(const json& j, const std::string& where) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) return {j[0].get<double>(), j[1].get<double>()};
  throw ConfigError(where + ": expected a number or a [re, im] pair");
}

inline json to_json(const Vector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(to_json(v[i]));
  return a;
}

inline json to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(to_json(m(i, j)));
    rows.push_back(row);
  }
  return rows;
}

inline Vector vector_from_json(const json& j, const std::string& where) {
  if (!j.is_array()) throw ConfigError(where + ": expected an array of amplitudes");
  Vector v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v[i] = complex_from_json(j[i], where + "[" + std::to_string(i) + "]");
  return v;
}

inline Matrix matrix_from_json(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw ConfigError(where + ": expected a non-empty array of rows");
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  Matrix m(j.size(), cols);
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_array() || j[i].size() != cols) throw ConfigError(where + ": ragged row " + std::to_string(i));
    for (std::size_t c = 0; c < cols; ++c)
      m(i, c) = complex_from_json(j[i][c], where + "[" + std::to_string(i) + "][" + std::to_string(c) + "]");
  }
  return m;
}

inline json to_json(const RegisterLayout& l) {
  json a = json::array();
  for (const auto& r : l.registers()) a.push_back({{"name", r.name}, {"qubits", r.qubits}});
  return a;
}

/// Debug dump of a state: layout plus amplitudes or row-major density.
inline json dump(const PureState& s) { return {{"layout", to_json(s.layout())}, {"amplitudes", to_json(s.amplitudes())}}; }
inline json dump(const MixedState& s) { return {{"layout", to_json(s.layout())}, {"density", to_json(s.matrix())}}; }

}  // namespace qzk::io
