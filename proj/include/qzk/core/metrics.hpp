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
#include <cmath>
#include <vector>

#include "qzk/core/state.hpp"

namespace qzk {

namespace detail {
inline void same_dims(const Matrix& a, const Matrix& b, const char* what) {
  if (a.rows() != b.rows() || !is_square(a) || !is_square(b)) throw DimensionError(std::string(what) + ": dimension mismatch");
}
}  // namespace detail

/// Td(a, b) = 1/2 ||a - b||_1 for Hermitian a, b. Also accepts
/// sub-normalized operands (used for cq-state comparisons).
inline double trace_distance(const Matrix& a, const Matrix& b) {
  detail::same_dims(a, b, "trace_distance");
  return 0.5 * trace_norm_hermitian(a - b);
}

inline double trace_distance(const MixedState& a, const MixedState& b) { return trace_distance(a.matrix(), b.matrix()); }

namespace detail {
/// Factor m = A A^dagger from the eigendecomposition, dropping eigenvalues
/// below a relative cutoff (numerical zeros of rank-deficient inputs would
/// otherwise contribute their square roots).
inline Matrix psd_factor(const Matrix& m, const char* what) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.adjoint()));
  const Eigen::VectorXd& ev = es.eigenvalues();
  const double cut = 1e-13 * std::max(1.0, ev.cwiseAbs().maxCoeff());
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    if (clamp_eigenvalue(ev(i), what) > cut) keep.push_back(i);
  Matrix a(m.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c) a.col(c) = es.eigenvectors().col(keep[c]) * std::sqrt(ev(keep[c]));
  return a;
}
}  // namespace detail

/// Squared-overlap fidelity (Tr sqrt(sqrt(a) b sqrt(a)))^2, evaluated as
/// ||A^dagger B||_1^2 for factorizations a = A A^dagger, b = B B^dagger.
inline double fidelity(const Matrix& a, const Matrix& b) {
  detail::same_dims(a, b, "fidelity");
  if (!is_hermitian(a) || !is_hermitian(b)) throw PreconditionError("fidelity: input is not Hermitian");
  const Matrix fa = detail::psd_factor(a, "fidelity"), fb = detail::psd_factor(b, "fidelity");
  if (fa.cols() == 0 || fb.cols() == 0) return 0.0;
  const double root = trace_norm(fa.adjoint() * fb);
  return std::min(1.0, root * root);
}

inline double fidelity(const MixedState& a, const MixedState& b) { return fidelity(a.matrix(), b.matrix()); }

inline double fidelity(const PureState& a, const PureState& b) {
  if (a.dim() != b.dim()) throw DimensionError("fidelity: dimension mismatch");
  return std::norm(a.amplitudes().dot(b.amplitudes()));
}

inline double fidelity(const MixedState& a, const PureState& b) {
  if (a.dim() != b.dim()) throw DimensionError("fidelity: dimension mismatch");
  return std::clamp((b.amplitudes().adjoint() * a.matrix() * b.amplitudes())(0, 0).real(), 0.0, 1.0);
}

struct GentleResult {
  double probability = 0.0;  // p = Tr(Pi rho)
  MixedState post;           // Pi rho Pi / p
  double bound = 0.0;        // sqrt(1 - p)
};

/// Post-measurement state for outcome Pi and the gentle-measurement bound.
inline GentleResult gentle_post_state(const MixedState& rho, const Matrix& pi) {
  detail::same_dims(rho.matrix(), pi, "gentle_post_state");
  if (!is_projector(pi)) throw PreconditionError("gentle_post_state: not a projector");
  const double p = (pi * rho.matrix()).trace().real();
  if (p <= kTol) throw PreconditionError("gentle_post_state: zero acceptance probability");
  Matrix post = pi * rho.matrix() * pi / p;
  return {p, MixedState(0.5 * (post + post.adjoint()), rho.layout()), std::sqrt(std::max(0.0, 1.0 - p))};
}

}  // namespace qzk
