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

#include <cmath>

#include "qzk/core/kernel.hpp"
#include "qzk/core/linalg.hpp"

namespace qzk::gates {

inline Matrix I(int qubits = 1) { return Matrix::Identity(pow2(qubits), pow2(qubits)); }

inline Matrix X() {
  Matrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

inline Matrix Y() {
  Matrix m(2, 2);
  m << 0, cplx(0, -1), cplx(0, 1), 0;
  return m;
}

inline Matrix Z() {
  Matrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

inline Matrix H() {
  Matrix m(2, 2);
  const double s = 1.0 / std::sqrt(2.0);
  m << s, s, s, -s;
  return m;
}

inline Matrix Ry(double theta) {
  Matrix m(2, 2);
  m << std::cos(theta / 2), -std::sin(theta / 2), std::sin(theta / 2), std::cos(theta / 2);
  return m;
}

/// |0><0| (x) Id + |1><1| (x) u, control is the most significant qubit.
inline Matrix controlled(const Matrix& u) {
  const Eigen::Index d = u.rows();
  Matrix m = Matrix::Zero(2 * d, 2 * d);
  m.topLeftCorner(d, d).setIdentity();
  m.bottomRightCorner(d, d) = u;
  return m;
}

inline Matrix CNOT() { return controlled(X()); }

/// SWAP of two k-qubit registers laid out as (a, b).
inline Matrix SWAP(int k = 1) {
  std::vector<int> a, b;
  for (int i = 0; i < k; ++i) {
    a.push_back(i);
    b.push_back(k + i);
  }
  return kernel::swap_wires(2 * k, a, b);
}

/// Controlled SWAP on (control, a[k], b[k]).
inline Matrix CSWAP(int k = 1) { return controlled(SWAP(k)); }

/// Pauli string from bit masks (x then z), qubit 0 most significant:
/// X^x Z^z on each qubit.
inline Matrix pauli(int n, std::size_t xmask, std::size_t zmask) {
  Matrix m = Matrix::Identity(1, 1);
  for (int q = 0; q < n; ++q) {
    const bool x = (xmask >> (n - 1 - q)) & 1U;
    const bool z = (zmask >> (n - 1 - q)) & 1U;
    Matrix p = Matrix::Identity(2, 2);
    if (z) p = Z() * p;
    if (x) p = X() * p;
    m = kron(m, p);
  }
  return m;
}

/// Bell pair preparation on two qubits: CNOT (H (x) Id); |00> -> (|00>+|11>)/sqrt2.
inline Matrix BellPrep() { return CNOT() * kron(H(), I(1)); }

}  // namespace qzk::gates
