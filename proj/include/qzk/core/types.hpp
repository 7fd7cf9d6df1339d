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

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace qzk {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Tolerance for exact identities (norms, unitarity, projector checks).
inline constexpr double kTol = 1e-9;

/// Eigenvalues in [-kClamp, 0) are treated as 0 before square roots.
inline constexpr double kClamp = 1e-9;

/// Branch probabilities at or below this are zero-probability branches
/// (carry no post-state).
inline constexpr double kZeroProb = 1e-12;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A documented precondition of an operation does not hold.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Operand dimensions or register sizes do not line up.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Unknown or duplicated register name.
class RegisterError : public Error {
 public:
  using Error::Error;
};

/// Requested system exceeds the configured qubit cap.
class CapExceeded : public Error {
 public:
  using Error::Error;
};

/// Invalid experiment configuration (field-level message).
class ConfigError : public Error {
 public:
  using Error::Error;
};

inline std::size_t pow2(int n) { return std::size_t{1} << n; }

inline bool is_power_of_two(std::size_t d) { return d != 0 && (d & (d - 1)) == 0; }

inline int log2_exact(std::size_t d) {
  if (!is_power_of_two(d)) throw DimensionError("dimension " + std::to_string(d) + " is not a power of two");
  int n = 0;
  while ((std::size_t{1} << n) < d) ++n;
  return n;
}

}  // namespace qzk
