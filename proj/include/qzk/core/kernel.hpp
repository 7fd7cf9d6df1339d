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

// Index arithmetic on raw amplitude vectors and density matrices. Qubit 0 is
// the most significant bit. Everything here is unchecked beyond dimensions;
// the typed layer in state.hpp does the register bookkeeping.

#pragma once

#include <numeric>
#include <vector>

#include "qzk/core/types.hpp"

namespace qzk::kernel {

/// offsets[j] = global index bits contributed by sub-index j placed on `qs`
/// (qs[0] is the most significant bit of j).
inline std::vector<std::size_t> scatter_offsets(int n, const std::vector<int>& qs) {
  const int k = static_cast<int>(qs.size());
  std::vector<std::size_t> off(pow2(k), 0);
  for (std::size_t j = 0; j < off.size(); ++j) {
    std::size_t g = 0;
    for (int b = 0; b < k; ++b)
      if ((j >> (k - 1 - b)) & 1U) g |= std::size_t{1} << (n - 1 - qs[b]);
    off[j] = g;
  }
  return off;
}

inline std::vector<int> complement(int n, const std::vector<int>& qs) {
  std::vector<bool> used(n, false);
  for (int q : qs) {
    if (q < 0 || q >= n) throw DimensionError("qubit index out of range");
    if (used[q]) throw DimensionError("repeated qubit index");
    used[q] = true;
  }
  std::vector<int> rest;
  for (int q = 0; q < n; ++q)
    if (!used[q]) rest.push_back(q);
  return rest;
}

inline void check_op(int n, const std::vector<int>& qs, const Matrix& u) {
  if (u.rows() != u.cols() || static_cast<std::size_t>(u.rows()) != pow2(static_cast<int>(qs.size())))
    throw DimensionError("operator of size " + std::to_string(u.rows()) + "x" + std::to_string(u.cols()) +
                         " does not act on " + std::to_string(qs.size()) + " qubits");
  (void)complement(n, qs);
}

/// v <- (u on qs) v.
inline void apply(Vector& v, int n, const std::vector<int>& qs, const Matrix& u) {
  check_op(n, qs, u);
  if (qs.empty()) {
    v *= u(0, 0);
    return;
  }
  const auto off = scatter_offsets(n, qs);
  const auto base = scatter_offsets(n, complement(n, qs));
  const std::size_t k = off.size();
  Vector x(k), y(k);
  for (std::size_t b : base) {
    for (std::size_t j = 0; j < k; ++j) x[j] = v[b + off[j]];
    y.noalias() = u * x;
    for (std::size_t j = 0; j < k; ++j) v[b + off[j]] = y[j];
  }
}

/// Columns of m transformed: m <- (u on qs) m.
inline void apply_left(Matrix& m, int n, const std::vector<int>& qs, const Matrix& u) {
  check_op(n, qs, u);
  const auto off = scatter_offsets(n, qs);
  const auto base = scatter_offsets(n, complement(n, qs));
  const std::size_t k = off.size();
  Matrix x(k, m.cols());
  for (std::size_t b : base) {
    for (std::size_t j = 0; j < k; ++j) x.row(j) = m.row(b + off[j]);
    Matrix y = u * x;
    for (std::size_t j = 0; j < k; ++j) m.row(b + off[j]) = y.row(j);
  }
}

/// rho <- U rho U^dagger with U = (u on qs).
inline void conjugate(Matrix& rho, int n, const std::vector<int>& qs, const Matrix& u) {
  apply_left(rho, n, qs, u);
  rho.adjointInPlace();
  apply_left(rho, n, qs, u);
  rho.adjointInPlace();
}

/// Full 2^n x 2^n matrix of u acting on qs.
inline Matrix embed(const Matrix& u, int n, const std::vector<int>& qs) {
  Matrix m = Matrix::Identity(pow2(n), pow2(n));
  apply_left(m, n, qs, u);
  return m;
}

/// Reduced density matrix on `keep` (in that order) of a pure vector.
inline Matrix reduce(const Vector& v, int n, const std::vector<int>& keep) {
  const auto ko = scatter_offsets(n, keep);
  const auto ro = scatter_offsets(n, complement(n, keep));
  Matrix psi(ko.size(), ro.size());
  for (std::size_t i = 0; i < ko.size(); ++i)
    for (std::size_t r = 0; r < ro.size(); ++r) psi(i, r) = v[ko[i] + ro[r]];
  return psi * psi.adjoint();
}

/// Reduced density matrix on `keep` (in that order) of a density matrix.
inline Matrix reduce(const Matrix& rho, int n, const std::vector<int>& keep) {
  const auto ko = scatter_offsets(n, keep);
  const auto ro = scatter_offsets(n, complement(n, keep));
  Matrix out = Matrix::Zero(ko.size(), ko.size());
  for (std::size_t i = 0; i < ko.size(); ++i)
    for (std::size_t j = 0; j < ko.size(); ++j) {
      cplx s = 0;
      for (std::size_t r : ro) s += rho(ko[i] + r, ko[j] + r);
      out(i, j) = s;
    }
  return out;
}

/// Matrix Psi with Psi(i, r) = v[keep = i, rest = r]; rows follow `keep`.
inline Matrix split(const Vector& v, int n, const std::vector<int>& keep) {
  const auto ko = scatter_offsets(n, keep);
  const auto ro = scatter_offsets(n, complement(n, keep));
  Matrix psi(ko.size(), ro.size());
  for (std::size_t i = 0; i < ko.size(); ++i)
    for (std::size_t r = 0; r < ro.size(); ++r) psi(i, r) = v[ko[i] + ro[r]];
  return psi;
}

/// Reorder qubits: new qubit i is old qubit perm[i].
inline Vector permute(const Vector& v, int n, const std::vector<int>& perm) {
  if (static_cast<int>(perm.size()) != n) throw DimensionError("permutation length mismatch");
  (void)complement(n, perm);
  const auto off = scatter_offsets(n, perm);
  Vector out(v.size());
  for (std::size_t j = 0; j < off.size(); ++j) out[j] = v[off[j]];
  return out;
}

inline Matrix permute(const Matrix& m, int n, const std::vector<int>& perm) {
  if (static_cast<int>(perm.size()) != n) throw DimensionError("permutation length mismatch");
  (void)complement(n, perm);
  const auto off = scatter_offsets(n, perm);
  Matrix out(m.rows(), m.cols());
  for (std::size_t i = 0; i < off.size(); ++i)
    for (std::size_t j = 0; j < off.size(); ++j) out(i, j) = m(off[i], off[j]);
  return out;
}

/// Permutation matrix on n qubits sending qubit a[i] <-> b[i].
inline Matrix swap_wires(int n, const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size()) throw DimensionError("swap_wires: unequal wire lists");
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  for (std::size_t i = 0; i < a.size(); ++i) std::swap(perm[a[i]], perm[b[i]]);
  const auto off = scatter_offsets(n, perm);
  Matrix out = Matrix::Zero(pow2(n), pow2(n));
  for (std::size_t j = 0; j < off.size(); ++j) out(j, off[j]) = 1;
  return out;
}

}  // namespace qzk::kernel
