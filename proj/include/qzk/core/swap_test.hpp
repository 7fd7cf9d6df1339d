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
#include <optional>

#include "qzk/core/gates.hpp"
#include "qzk/core/metrics.hpp"
#include "qzk/core/random.hpp"

namespace qzk {

struct SwapTestResult {
  double accept = 0.0;       // circuit path
  double accept_povm = 0.0;  // Tr(E_0 rho)
  std::optional<MixedState> post_accept;  // on (A, B), A = tested, B = reference
  std::optional<MixedState> post_reject;
};

/// Accepting projector of the SWAP test on two k-qubit registers, (Id + SWAP)/2.
inline Matrix swap_test_accept_projector(int k) {
  return 0.5 * (gates::I(2 * k) + gates::SWAP(k));
}

/// E_0 = (Id + |psi><psi|)/2.
inline Matrix swap_test_povm_element(const Vector& psi) {
  const auto d = psi.size();
  return 0.5 * (Matrix::Identity(d, d) + psi * psi.adjoint());
}

inline double swap_test_povm(const Matrix& rho, const Vector& psi) {
  if (rho.rows() != psi.size()) throw DimensionError("swap_test: dimension mismatch");
  return (swap_test_povm_element(psi) * rho).trace().real();
}

namespace detail {

/// Ancilla in |+>, controlled-SWAP(A, B), ancilla measured in the Hadamard
/// basis. Returns the unnormalized (A, B) blocks for outcomes + and -.
inline std::pair<Matrix, Matrix> swap_test_circuit_blocks(const Matrix& rho_ab, int k) {
  const int n = 1 + 2 * k;
  Matrix anc = Matrix::Zero(2, 2);
  anc(0, 0) = 1;
  Matrix full = kron(anc, rho_ab);
  kernel::conjugate(full, n, {0}, gates::H());
  std::vector<int> all(n);
  for (int i = 0; i < n; ++i) all[i] = i;
  kernel::conjugate(full, n, all, gates::CSWAP(k));
  kernel::conjugate(full, n, {0}, gates::H());
  const auto d = pow2(2 * k);
  return {full.topLeftCorner(d, d), full.bottomRightCorner(d, d)};
}

}  // namespace detail

/// SWAP test of rho (k qubits) against the pure reference psi, via the
/// explicit circuit; the POVM value is computed independently alongside.
inline SwapTestResult swap_test(const MixedState& rho, const PureState& psi) {
  if (rho.dim() != psi.dim()) throw DimensionError("swap_test: tested and reference registers differ in size");
  const int k = rho.layout().total_qubits();
  auto [acc, rej] = detail::swap_test_circuit_blocks(kron(rho.matrix(), psi.density()), k);
  SwapTestResult r;
  r.accept = acc.trace().real();
  r.accept_povm = swap_test_povm(rho.matrix(), psi.amplitudes());
  RegisterLayout ab{{"A", k}, {"B", k}};
  if (r.accept > kZeroProb) r.post_accept = MixedState::normalized(0.5 * (acc + acc.adjoint()), ab);
  if (1.0 - r.accept > kZeroProb) r.post_reject = MixedState::normalized(0.5 * (rej + rej.adjoint()), ab);
  return r;
}

inline SwapTestResult swap_test(const PureState& rho, const PureState& psi) { return swap_test(MixedState(rho), psi); }

struct SwapTestSample {
  bool accepted = false;
  MixedState post;
};

/// One sampled run of the circuit.
inline SwapTestSample sample_swap_test(const MixedState& rho, const PureState& psi, Rng& rng) {
  auto r = swap_test(rho, psi);
  const bool acc = rng.bernoulli(r.accept);
  return {acc, acc ? *r.post_accept : *r.post_reject};
}

}  // namespace qzk
