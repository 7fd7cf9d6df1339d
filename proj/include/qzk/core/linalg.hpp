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
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "qzk/core/types.hpp"

namespace qzk {

inline bool is_square(const Matrix& m) { return m.rows() == m.cols(); }

inline double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

inline bool is_hermitian(const Matrix& m, double tol = kTol) {
  return is_square(m) && max_abs(m - m.adjoint()) <= tol;
}

/// Exact check up to 128 rows; above that, U^dagger U X = X on a fixed
/// Gaussian probe X (a nonzero U^dagger U - Id annihilates it with
/// probability 0).
inline bool is_unitary(const Matrix& u, double tol = kTol) {
  if (!is_square(u)) return false;
  const auto d = u.rows();
  if (d <= 128) return max_abs(u * u.adjoint() - Matrix::Identity(d, d)) <= tol;
  Matrix x(d, 4);
  std::uint64_t z = 0x2545f4914f6cdd1dULL;
  auto next = [&z] {
    z ^= z << 13, z ^= z >> 7, z ^= z << 17;
    return static_cast<double>(z >> 11) * 0x1.0p-53 - 0.5;
  };
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = cplx(next(), next());
  for (Eigen::Index j = 0; j < x.cols(); ++j) x.col(j).normalize();
  const Matrix y = u.adjoint() * (u * x);
  return max_abs(y - x) <= tol;
}

inline bool is_projector(const Matrix& p, double tol = kTol) {
  return is_hermitian(p, tol) && max_abs(p * p - p) <= tol;
}

/// Eigenvalues of the Hermitian part, ascending.
inline Eigen::VectorXd hermitian_eigenvalues(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.adjoint()), Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

inline double min_eigenvalue(const Matrix& m) {
  auto ev = hermitian_eigenvalues(m);
  return ev.size() ? ev.minCoeff() : 0.0;
}

inline bool is_psd(const Matrix& m, double tol = kTol) { return is_hermitian(m, tol) && min_eigenvalue(m) >= -tol; }

/// Operator norm <= 1, i.e. m^dagger m <= Id.
inline bool is_contraction(const Matrix& m, double tol = kTol) {
  if (m.size() == 0) return true;
  const auto ev = hermitian_eigenvalues(m.adjoint() * m);
  return ev(ev.size() - 1) <= 1.0 + 2 * tol;
}

inline double clamp_eigenvalue(double x, const std::string& what) {
  if (x < -kClamp) throw PreconditionError(what + ": matrix is not positive semidefinite (eigenvalue " + std::to_string(x) + ")");
  return x < 0 ? 0.0 : x;
}

/// Square root of a PSD matrix; eigenvalues in [-1e-9, 0) clamp to 0.
inline Matrix sqrt_psd(const Matrix& m, const std::string& what = "sqrt_psd") {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.adjoint()));
  Eigen::VectorXd ev = es.eigenvalues();
  for (Eigen::Index i = 0; i < ev.size(); ++i) ev(i) = std::sqrt(clamp_eigenvalue(ev(i), what));
  return es.eigenvectors() * ev.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
}

/// Schatten 1-norm of a Hermitian matrix.
inline double trace_norm_hermitian(const Matrix& m) { return hermitian_eigenvalues(m).cwiseAbs().sum(); }

/// Schatten 1-norm of an arbitrary matrix.
inline double trace_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues().sum();
}

inline Matrix ketbra(const Vector& a, const Vector& b) { return a * b.adjoint(); }
inline Matrix projector_onto(const Vector& v) { return v * v.adjoint() / v.squaredNorm(); }

inline Vector basis_state(std::size_t dim, std::size_t index) {
  Vector v = Vector::Zero(dim);
  v[index] = 1;
  return v;
}

/// Kronecker product of two dense matrices.
inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline Vector kron(const Vector& a, const Vector& b) {
  Vector out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a[i] * b;
  return out;
}

/// Unitary maximizing Re Tr(U K): U = V W^dagger for K = W S V^dagger.
inline Matrix polar_align(const Matrix& k) {
  Eigen::JacobiSVD<Matrix> svd(k, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixV() * svd.matrixU().adjoint();
}

/// Orthonormal completion: columns spanning the orthogonal complement of the
/// column span of q (q assumed to have orthonormal columns).
inline Matrix orthonormal_complement(const Matrix& q) {
  const Eigen::Index d = q.rows();
  Matrix p = Matrix::Identity(d, d) - q * q.adjoint();
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (p + p.adjoint()));
  const Eigen::Index k = d - q.cols();
  // Eigenvalues ascend; the last k belong to the complement.
  return es.eigenvectors().rightCols(k);
}

}  // namespace qzk
