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
#include <cstdint>
#include <limits>
#include <random>
#include <string_view>

#include <Eigen/QR>

#include "qzk/core/state.hpp"

namespace qzk {

/// Counter-based splittable generator. Output i of a stream with key k is
/// mix(k + (i + 1) * golden), i.e. SplitMix64 evaluated at a counter, so
/// streams can be derived from (seed, experiment, trial) without ever
/// sharing state.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed = 0) : key_(mix(seed ^ 0x6a09e667f3bcc909ULL)) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() { return mix(key_ + (++counter_) * kGolden); }

  /// Independent child stream; does not advance this stream.
  Rng split(std::uint64_t stream) const {
    Rng r;
    r.key_ = mix(key_ ^ mix(stream + 0x243f6a8885a308d3ULL));
    return r;
  }

  Rng split(std::string_view label) const { return split(fnv1a(label)); }

  /// Stream for one Monte-Carlo trial of one experiment.
  static Rng for_trial(std::uint64_t seed, std::string_view experiment, std::uint64_t trial) {
    return Rng(seed).split(experiment).split(trial);
  }

  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform() < p; }

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    if (n == 0) throw PreconditionError("Rng::below: empty range");
    std::uniform_int_distribution<std::uint64_t> d(0, n - 1);
    return d(*this);
  }

  double normal() {
    std::normal_distribution<double> d(0.0, 1.0);
    return d(*this);
  }

  std::uint64_t counter() const { return counter_; }

  static std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
    return h;
  }

 private:
  static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
};

inline Matrix ginibre(std::size_t rows, std::size_t cols, Rng& rng) {
  Matrix g(rows, cols);
  for (std::size_t j = 0; j < cols; ++j)
    for (std::size_t i = 0; i < rows; ++i) g(i, j) = cplx(rng.normal(), rng.normal()) / std::sqrt(2.0);
  return g;
}

/// Haar-random unitary: QR of a complex Gaussian matrix with the phases of
/// R's diagonal absorbed into Q.
inline Matrix random_unitary(std::size_t dim, Rng& rng) {
  if (dim == 0) throw PreconditionError("random_unitary: dim must be >= 1");
  Matrix g = ginibre(dim, dim, rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(dim, dim);
  Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (std::size_t i = 0; i < dim; ++i) {
    const cplx d = r(i, i);
    const double a = std::abs(d);
    q.col(i) *= (a > 0 ? d / a : cplx(1.0));
  }
  return q;
}

inline Vector random_vector(std::size_t dim, Rng& rng) {
  Vector v = ginibre(dim, 1, rng).col(0);
  return v / v.norm();
}

inline PureState random_pure_state(const RegisterLayout& layout, Rng& rng) {
  return PureState(random_vector(layout.dim(), rng), layout);
}

/// Random density matrix of the given rank (Ginibre ensemble G G^dagger / Tr).
inline Matrix random_density(std::size_t dim, std::size_t rank, Rng& rng) {
  Matrix g = ginibre(dim, rank, rng);
  Matrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return 0.5 * (rho + rho.adjoint());
}

inline MixedState random_mixed_state(const RegisterLayout& layout, Rng& rng) {
  return MixedState(random_density(layout.dim(), layout.dim(), rng), layout);
}

/// Random rank-k projector (span of k Haar columns).
inline Matrix random_projector(std::size_t dim, std::size_t rank, Rng& rng) {
  Matrix u = random_unitary(dim, rng).leftCols(rank);
  return u * u.adjoint();
}

}  // namespace qzk
