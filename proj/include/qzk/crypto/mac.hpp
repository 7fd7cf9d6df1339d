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
#include <numeric>
#include <optional>
#include <vector>

#include "qzk/core.hpp"

namespace qzk {

/// Key of the toy trap code: a wire permutation of the m + t code wires
/// (new wire i carries old wire perm[i]) followed by a Pauli mask.
struct MacKey {
  std::vector<int> perm;
  std::size_t xmask = 0, zmask = 0;
};

/// Toy trap code: append t traps in |0>, permute wires, apply a Pauli.
/// Decoding inverts both and accepts iff every trap reads 0; on rejection
/// the message register is replaced by tau_M = Id / 2^m.
struct QuantumMac {
  int m = 1, t = 3;
  static constexpr std::size_t kKeyCap = std::size_t{1} << 16;

  int width() const { return m + t; }

  std::size_t permutation_count() const {
    std::size_t f = 1;
    for (int i = 2; i <= width(); ++i) f *= static_cast<std::size_t>(i);
    return f;
  }
  std::size_t key_count() const { return permutation_count() * pow2(2 * width()); }

  /// Key by index: permutations in lexicographic order, then (x, z) masks.
  MacKey key(std::size_t index) const {
    if (index >= key_count()) throw PreconditionError("QuantumMac: unknown key " + std::to_string(index));
    const std::size_t paulis = pow2(2 * width());
    std::size_t p = index / paulis;
    const std::size_t q = index % paulis;
    MacKey k;
    // Lehmer decoding of p.
    std::vector<int> pool(width());
    std::iota(pool.begin(), pool.end(), 0);
    std::size_t f = permutation_count();
    for (int i = width(); i >= 1; --i) {
      f /= static_cast<std::size_t>(i);
      const std::size_t j = p / f;
      p %= f;
      k.perm.push_back(pool[j]);
      pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(j));
    }
    k.xmask = q >> width();
    k.zmask = q & (pow2(width()) - 1);
    return k;
  }

  void check_key(const MacKey& k) const {
    std::vector<int> s = k.perm;
    std::sort(s.begin(), s.end());
    for (int i = 0; i < width(); ++i)
      if (static_cast<int>(s.size()) != width() || s[i] != i) throw PreconditionError("QuantumMac: key is not a wire permutation");
    if (k.xmask >= pow2(width()) || k.zmask >= pow2(width())) throw PreconditionError("QuantumMac: Pauli mask out of range");
  }

  /// Encoding unitary on the code wires (message first, then traps).
  Matrix encoder(const MacKey& k) const {
    check_key(k);
    const auto off = kernel::scatter_offsets(width(), k.perm);
    Matrix perm = Matrix::Zero(pow2(width()), pow2(width()));
    for (std::size_t j = 0; j < off.size(); ++j) perm(j, off[j]) = 1;
    return gates::pauli(width(), k.xmask, k.zmask) * perm;
  }
};

namespace detail {

inline Matrix zero_traps(int m, int t) {
  Matrix z = Matrix::Zero(pow2(t), pow2(t));
  z(0, 0) = 1;
  return kron(gates::I(m), z);
}

inline Matrix flag(int b) {
  Matrix f = Matrix::Zero(2, 2);
  f(b, b) = 1;
  return f;
}

/// Dec on (C, R) -> (M, R, F).
inline Matrix mac_decode_with(const QuantumMac& mac, const Matrix& enc, const Matrix& rho_cr, int r) {
  const int n = mac.width() + r;
  Matrix x = rho_cr;
  std::vector<int> code(mac.width());
  std::iota(code.begin(), code.end(), 0);
  kernel::conjugate(x, n, code, enc.adjoint());
  Matrix acc = x;
  const Matrix p0 = zero_traps(mac.m, mac.t);
  kernel::conjugate(acc, n, code, p0);
  std::vector<int> keep_mr, keep_r;
  for (int i = 0; i < mac.m; ++i) keep_mr.push_back(i);
  for (int i = mac.width(); i < n; ++i) keep_mr.push_back(i), keep_r.push_back(i);
  const Matrix acc_mr = kernel::reduce(acc, n, keep_mr);
  const Matrix rej_r = kernel::reduce(x, n, keep_r) - kernel::reduce(acc, n, keep_r);
  const Matrix tau = gates::I(mac.m) / static_cast<double>(pow2(mac.m));
  Matrix out = kron(acc_mr, flag(1)) + kron(kron(tau, rej_r), flag(0));
  return 0.5 * (out + out.adjoint());
}

}  // namespace detail

/// Enc^(k): M -> C.
inline MixedState mac_encode(const QuantumMac& mac, const MacKey& k, const MixedState& msg) {
  if (msg.layout().total_qubits() != mac.m) throw DimensionError("mac_encode: message size mismatch");
  const Matrix e = mac.encoder(k);
  Matrix traps = Matrix::Zero(pow2(mac.t), pow2(mac.t));
  traps(0, 0) = 1;
  Matrix c = e * kron(msg.matrix(), traps) * e.adjoint();
  return MixedState(0.5 * (c + c.adjoint()), RegisterLayout{{"C", mac.width()}});
}

/// Dec^(k): C -> (M, F).
inline MixedState mac_decode(const QuantumMac& mac, const MacKey& k, const MixedState& code) {
  if (code.layout().total_qubits() != mac.width()) throw DimensionError("mac_decode: code size mismatch");
  return MixedState(detail::mac_decode_with(mac, mac.encoder(k), code.matrix(), 0), RegisterLayout{{"M", mac.m}, {"F", 1}});
}

/// Completely positive maps (S_acc, S_rej) on R as Kraus lists; together
/// they must be trace preserving.
struct MacSimulator {
  std::vector<Matrix> accept, reject;

  void validate(int r) const {
    Matrix sum = Matrix::Zero(pow2(r), pow2(r));
    for (const auto& k : accept) sum += k.adjoint() * k;
    for (const auto& k : reject) sum += k.adjoint() * k;
    if (max_abs(sum - gates::I(r)) > 1e-9) throw PreconditionError("MacSimulator: S_acc + S_rej is not trace preserving");
  }
};

/// S_acc = p Id, S_rej = (1 - p) Id.
inline MacSimulator natural_mac_simulator(double p_accept, int r) {
  return {{std::sqrt(p_accept) * gates::I(r)}, {std::sqrt(1 - p_accept) * gates::I(r)}};
}

/// Key-averaged real channel on rho_MR: (1/|K|) sum_k Dec^(k) A Enc^(k).
/// Output on (M, R, F). The attack acts on (C, R). Key spaces above the cap
/// are sampled with `rng`.
inline Matrix mac_real_average(const QuantumMac& mac, const Matrix& attack, const Matrix& rho_mr, int r, Rng* rng = nullptr,
                               std::size_t samples = 4096) {
  const int n = mac.width() + r;
  check_cap(n, "mac_real_average");
  if (static_cast<std::size_t>(rho_mr.rows()) != pow2(mac.m + r)) throw DimensionError("mac_real_average: input is not on (M, R)");
  if (static_cast<std::size_t>(attack.rows()) != pow2(n) || !is_unitary(attack))
    throw DimensionError("mac_real_average: attack is not a unitary on (C, R)");
  const bool enumerate = mac.key_count() <= QuantumMac::kKeyCap;
  if (!enumerate && !rng) throw PreconditionError("mac_real_average: key space exceeds the enumeration cap and no rng given");
  Matrix traps = Matrix::Zero(pow2(mac.t), pow2(mac.t));
  traps(0, 0) = 1;
  // (M, R) -> (M, T, R): insert traps after M.
  std::vector<int> perm;
  for (int i = 0; i < mac.m; ++i) perm.push_back(i);
  for (int i = 0; i < mac.t; ++i) perm.push_back(mac.m + r + i);
  for (int i = 0; i < r; ++i) perm.push_back(mac.m + i);
  const Matrix padded = kernel::permute(kron(rho_mr, traps), n, perm);
  std::vector<int> code(mac.width());
  std::iota(code.begin(), code.end(), 0);
  const std::size_t count = enumerate ? mac.key_count() : samples;
  Matrix total = Matrix::Zero(pow2(mac.m + r + 1), pow2(mac.m + r + 1));
  for (std::size_t i = 0; i < count; ++i) {
    const MacKey k = mac.key(enumerate ? i : rng->below(mac.key_count()));
    const Matrix e = mac.encoder(k);
    Matrix x = padded;
    kernel::conjugate(x, n, code, e);
    x = attack * x * attack.adjoint();
    total += detail::mac_decode_with(mac, e, x, r);
  }
  return total / static_cast<double>(count);
}

/// Ideal(S_acc, S_rej) rho_MR on (M, R, F) with tau_M = Id / 2^m.
inline Matrix mac_ideal(const QuantumMac& mac, const MacSimulator& sim, const Matrix& rho_mr, int r) {
  sim.validate(r);
  const int n = mac.m + r;
  std::vector<int> rq;
  for (int i = mac.m; i < n; ++i) rq.push_back(i);
  Matrix acc = Matrix::Zero(rho_mr.rows(), rho_mr.cols()), rej = acc;
  for (const auto& k : sim.accept) {
    Matrix x = rho_mr;
    kernel::conjugate(x, n, rq, k);
    acc += x;
  }
  for (const auto& k : sim.reject) {
    Matrix x = rho_mr;
    kernel::conjugate(x, n, rq, k);
    rej += x;
  }
  const Matrix tau = gates::I(mac.m) / static_cast<double>(pow2(mac.m));
  return kron(acc, detail::flag(1)) + kron(kron(tau, kernel::reduce(rej, n, rq)), detail::flag(0));
}

/// Td between the key-averaged real channel and the ideal channel.
inline double mac_real_vs_ideal(const QuantumMac& mac, const Matrix& attack, const Matrix& rho_mr, int r, const MacSimulator& sim,
                                Rng* rng = nullptr) {
  return trace_distance(mac_real_average(mac, attack, rho_mr, r, rng), mac_ideal(mac, sim, rho_mr, r));
}

/// Key-averaged probability that decoding rejects.
inline double mac_detection_probability(const QuantumMac& mac, const Matrix& attack, const Matrix& rho_mr, int r, Rng* rng = nullptr) {
  const Matrix out = mac_real_average(mac, attack, rho_mr, r, rng);
  double rej = 0;
  for (Eigen::Index i = 0; i < out.rows(); i += 2) rej += out(i, i).real();
  return rej;
}

}  // namespace qzk
