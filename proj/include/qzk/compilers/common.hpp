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
#include <functional>
#include <string>
#include <vector>

#include "qzk/protocol/interactive.hpp"

namespace qzk {

enum class Stage { HonestVerifier, Collapsed, Repeated, PublicCoin, Malicious };

inline const char* to_string(Stage s) {
  switch (s) {
    case Stage::HonestVerifier: return "I";
    case Stage::Collapsed: return "II";
    case Stage::Repeated: return "repeated";
    case Stage::PublicCoin: return "III";
    case Stage::Malicious: return "IV";
  }
  return "?";
}

/// Absolute qubit indices of a named register of a compiled protocol.
struct NamedWires {
  std::string name;
  std::vector<int> wires;
};

/// A compiled protocol in executable form together with the protocol it was
/// built from and its closed-form soundness as a function of the base error.
struct CompiledProtocol {
  Stage stage = Stage::HonestVerifier;
  InteractiveProtocol protocol;
  std::vector<InteractiveProtocol> underlying;
  std::vector<NamedWires> registers;
  std::function<double(double zeta)> soundness;
  int base_rounds = 0;
  int copies = 1;  // parallel repetitions
  int reps = 1;    // sequential iterations

  const InteractiveProtocol& base() const { return underlying.at(0); }

  const std::vector<int>& wires(const std::string& name) const {
    for (const auto& r : registers)
      if (r.name == name) return r.wires;
    throw RegisterError(protocol.name + ": no register '" + name + "'");
  }
};

/// Simulator unitaries S_1..S_r on (S, M), S a private register starting in
/// |0>. Never touches W.
struct HvzkSimulator {
  std::string label;
  int s_qubits = 0;
  std::vector<Matrix> ops;
  std::int64_t copy_budget = 1;

  void validate(const InteractiveProtocol& base) const {
    if (static_cast<int>(ops.size()) != base.rounds())
      throw PreconditionError("HvzkSimulator: " + std::to_string(ops.size()) + " unitaries for " + std::to_string(base.rounds()) + " rounds");
    for (const auto& s : ops)
      if (static_cast<std::size_t>(s.rows()) != pow2(s_qubits + base.m_qubits) || !is_unitary(s, 1e-8))
        throw PreconditionError("HvzkSimulator: S_k is not a unitary on (S, M)");
    if (copy_budget < 1) throw PreconditionError("HvzkSimulator: copy budget exhausted");
  }
};

/// Sequential accumulation of gates on n wires.
struct Circuit {
  int n = 0;
  Matrix u;

  explicit Circuit(int qubits) : n(qubits), u(gates::I(qubits)) {}

  Circuit& add(const Matrix& g, const std::vector<int>& qs) {
    kernel::apply_left(u, n, qs, g);
    return *this;
  }
  Circuit& swap(const std::vector<int>& a, const std::vector<int>& b) {
    if (a.size() != b.size()) throw DimensionError("Circuit::swap: register sizes differ");
    for (std::size_t i = 0; i < a.size(); ++i) add(gates::SWAP(1), {a[i], b[i]});
    return *this;
  }
};

/// Consecutive wire indices [start, start + count).
inline std::vector<int> span(int start, int count) {
  std::vector<int> v(static_cast<std::size_t>(std::max(0, count)));
  for (int i = 0; i < count; ++i) v[i] = start + i;
  return v;
}

inline std::vector<int> concat(std::vector<int> a, const std::vector<int>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

/// |1><1| on the first qubit of k.
inline Matrix first_qubit_one(int k) {
  Matrix one = Matrix::Zero(2, 2);
  one(1, 1) = 1;
  return kron(one, gates::I(k - 1));
}

namespace detail {

/// Indices moved down by `by` (absolute -> verifier space).
inline std::vector<int> shift(const std::vector<int>& v, int by) {
  std::vector<int> out;
  for (int q : v) out.push_back(q - by);
  return out;
}

/// psi_v when the initial state is |0>_R (x) psi_v (x) |0>_M.
inline Vector verifier_initial(const InteractiveProtocol& p) {
  const std::size_t dw = pow2(p.w_qubits), dm = pow2(p.m_qubits);
  Vector psi(dw);
  for (std::size_t w = 0; w < dw; ++w) psi[w] = p.initial[w * dm];
  if (std::abs(psi.norm() - 1.0) > 1e-9)
    throw PreconditionError(p.name + ": initial state is not |0>_R (x) psi_v (x) |0>_M");
  return psi;
}

inline void require_unitary_verifier(const InteractiveProtocol& p, const char* what) {
  for (const auto& row : p.verifier)
    for (const auto& v : row)
      if (!is_unitary(v, 1e-8)) throw PreconditionError(std::string(what) + ": verifier ops must be unitary");
}

inline void require_no_coins(const InteractiveProtocol& p, const char* what) {
  for (int i = 0; i < p.rounds(); ++i)
    if (p.coins(i) != 1) throw PreconditionError(std::string(what) + ": base verifier must not toss coins");
}

inline const ProverStrategy& require_honest(const InteractiveProtocol& p, const char* what) {
  if (!p.honest) throw PreconditionError(std::string(what) + ": base protocol has no honest prover");
  return *p.honest;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Closed-form soundness evaluators. Values above 1 are returned unclamped.

/// 1 - (1 - zeta)^2 / (16 (r - 1)^2).
inline double collapsed_soundness(double zeta, int r) {
  if (r < 2) throw PreconditionError("collapsed_soundness: need r >= 2");
  if (zeta < 0 || zeta > 1) throw PreconditionError("collapsed_soundness: zeta outside [0, 1]");
  const double g = 1 - zeta;
  return 1 - g * g / (16.0 * (r - 1) * (r - 1));
}

/// zeta^k.
inline double repeated_soundness(double zeta, int k) {
  if (k < 1) throw PreconditionError("repeated_soundness: need k >= 1");
  if (zeta < 0 || zeta > 1) throw PreconditionError("repeated_soundness: zeta outside [0, 1]");
  return std::pow(zeta, k);
}

/// 3/4 + sqrt(zeta) / 2.
inline double public_coin_soundness(double zeta) {
  if (zeta < 0 || zeta > 1) throw PreconditionError("public_coin_soundness: zeta outside [0, 1]");
  return 0.75 + std::sqrt(zeta) / 2;
}

/// collapsed -> k-fold repeated -> public coin.
inline double pipeline_soundness(double zeta, int r, int k) { return public_coin_soundness(repeated_soundness(collapsed_soundness(zeta, r), k)); }

// ---------------------------------------------------------------------------
// Base protocols.

/// Random r-round base with perfect completeness: Haar prover and verifier
/// unitaries, except that V_r maps the support of the honest W M state into
/// the accepting subspace. Needs r_qubits <= w_qubits + m_qubits - 1.
inline InteractiveProtocol random_perfect_base(Rng& rng, int r, int r_qubits, int w_qubits, int m_qubits, std::string name = "random-base") {
  if (r < 1) throw PreconditionError("random_perfect_base: need r >= 1");
  if (r_qubits > w_qubits + m_qubits - 1) throw PreconditionError("random_perfect_base: R too large for perfect completeness");
  InteractiveProtocol p;
  p.name = std::move(name);
  p.r_qubits = r_qubits;
  p.w_qubits = w_qubits;
  p.m_qubits = m_qubits;
  const Vector psi = random_vector(pow2(w_qubits), rng);
  p.initial = kron(kron(basis_state(pow2(r_qubits), 0), psi), basis_state(pow2(m_qubits), 0));
  ProverStrategy h;
  h.kind = ProverStrategy::Kind::Honest;
  h.label = "honest";
  h.r_qubits = r_qubits;
  const int n = r_qubits + w_qubits + m_qubits;
  const auto wires = detail::wires_for(p, r_qubits);
  Vector v = p.initial;
  for (int i = 0; i < r; ++i) {
    h.rounds.push_back({random_unitary(pow2(r_qubits + m_qubits), rng)});
    kernel::apply(v, n, wires.prover, h.rounds.back()[0]);
    if (i + 1 < r) {
      p.verifier.push_back({random_unitary(pow2(w_qubits + m_qubits), rng)});
      kernel::apply(v, n, wires.verifier, p.verifier.back()[0]);
    }
  }
  // V_r: support of rho_WM onto |1> (x) (...), the rest anywhere.
  const Matrix rho = kernel::reduce(v, n, wires.verifier);
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (rho + rho.adjoint()));
  const auto d = static_cast<Eigen::Index>(pow2(w_qubits + m_qubits));
  std::vector<Eigen::Index> supp, rest;
  for (Eigen::Index j = d - 1; j >= 0; --j) (es.eigenvalues()(j) > 1e-12 ? supp : rest).push_back(j);
  Matrix e(d, d);
  Eigen::Index col = 0;
  for (auto j : supp) e.col(col++) = es.eigenvectors().col(j);
  for (auto j : rest) e.col(col++) = es.eigenvectors().col(j);
  // Targets: first the accepting half, then the rejecting half, each mixed.
  const Eigen::Index half = d / 2;
  Matrix t = Matrix::Zero(d, d);
  t.block(half, 0, half, half) = random_unitary(static_cast<std::size_t>(half), rng);
  t.block(0, half, half, half) = random_unitary(static_cast<std::size_t>(half), rng);
  p.verifier.push_back({t * e.adjoint()});
  p.honest = h;
  p.validate();
  return p;
}

/// Random coinless r-round base without an honest prover: Haar verifier
/// unitaries and verifier input. With product_first, V_1 = U_W (x) U_M, so
/// the 3-message optimum is exact.
inline InteractiveProtocol random_base(Rng& rng, int r, int r_qubits, int w_qubits, int m_qubits, bool product_first = false,
                                       std::string name = "random-base") {
  if (r < 1) throw PreconditionError("random_base: need r >= 1");
  InteractiveProtocol p;
  p.name = std::move(name);
  p.r_qubits = r_qubits;
  p.w_qubits = w_qubits;
  p.m_qubits = m_qubits;
  p.initial = kron(kron(basis_state(pow2(r_qubits), 0), random_vector(pow2(w_qubits), rng)), basis_state(pow2(m_qubits), 0));
  for (int i = 0; i < r; ++i) {
    if (i == 0 && product_first)
      p.verifier.push_back({kron(random_unitary(pow2(w_qubits), rng), random_unitary(pow2(m_qubits), rng))});
    else
      p.verifier.push_back({random_unitary(pow2(w_qubits + m_qubits), rng)});
  }
  p.validate();
  return p;
}

/// Random coinless 3-message base with V_1 = U_W (x) U_M and soundness
/// exactly zeta: the accepting subspace of V_2 meets psi_v' (x) C^M (psi_v'
/// = U_W psi_v) at principal angles whose largest squared cosine is zeta;
/// the rest are drawn uniformly below it. Needs w_qubits >= 1.
inline InteractiveProtocol random_sound_base(Rng& rng, double zeta, int r_qubits, int w_qubits, int m_qubits,
                                             std::string name = "sound-base") {
  if (zeta < 0 || zeta > 1) throw PreconditionError("random_sound_base: zeta outside [0, 1]");
  if (w_qubits < 1) throw PreconditionError("random_sound_base: need w_qubits >= 1");
  const auto dw = static_cast<Eigen::Index>(pow2(w_qubits)), dm = static_cast<Eigen::Index>(pow2(m_qubits));
  const Eigen::Index d = dw * dm, half = d / 2;
  const Matrix uw = random_unitary(static_cast<std::size_t>(dw), rng), um = random_unitary(static_cast<std::size_t>(dm), rng);
  const Vector psi = random_vector(static_cast<std::size_t>(dw), rng);
  const Vector psi1 = uw * psi;
  // S = psi' (x) C^M and a random basis of its complement.
  Matrix s(d, dm);
  for (Eigen::Index j = 0; j < dm; ++j) s.col(j) = kron(psi1, basis_state(static_cast<std::size_t>(dm), static_cast<std::size_t>(j)));
  Matrix perp = orthonormal_complement(s);
  perp = perp * random_unitary(static_cast<std::size_t>(perp.cols()), rng);
  s = s * random_unitary(static_cast<std::size_t>(dm), rng);
  // Accepting subspace: a_j = cos t_j perp_j + sin t_j s_j.
  Matrix a(d, half);
  for (Eigen::Index j = 0; j < half; ++j) {
    if (j < dm) {
      const double c2 = j == 0 ? zeta : zeta * rng.uniform();
      a.col(j) = std::sqrt(1 - c2) * perp.col(j) + std::sqrt(c2) * s.col(j);
    } else {
      a.col(j) = perp.col(j);
    }
  }
  const Matrix rest = orthonormal_complement(a);
  // V_2: a_j -> |1>|j'>, rest -> |0>|j'>, scrambled inside each half.
  Matrix v2 = Matrix::Zero(d, d);
  v2.bottomRows(half) = random_unitary(static_cast<std::size_t>(half), rng) * a.adjoint();
  v2.topRows(half) = random_unitary(static_cast<std::size_t>(half), rng) * rest.adjoint();
  InteractiveProtocol p;
  p.name = std::move(name);
  p.r_qubits = r_qubits;
  p.w_qubits = w_qubits;
  p.m_qubits = m_qubits;
  p.initial = kron(kron(basis_state(pow2(r_qubits), 0), psi), basis_state(pow2(m_qubits), 0));
  p.verifier = {{kron(uw, um)}, {v2}};
  p.validate();
  return p;
}

/// The same protocol on a different verifier input psi_v.
inline InteractiveProtocol with_verifier_input(const InteractiveProtocol& base, const Vector& psi_v, std::string name = "") {
  InteractiveProtocol p = base;
  if (static_cast<std::size_t>(psi_v.size()) != pow2(base.w_qubits)) throw DimensionError("with_verifier_input: psi_v has the wrong size");
  p.initial = kron(kron(basis_state(pow2(base.r_qubits), 0), Vector(psi_v / psi_v.norm())), basis_state(pow2(base.m_qubits), 0));
  if (!name.empty()) p.name = std::move(name);
  p.validate();
  return p;
}

/// Honest prover unitaries as an exact simulator (S = R).
inline HvzkSimulator honest_stand_in(const InteractiveProtocol& base, std::int64_t budget = 1) {
  const auto& h = detail::require_honest(base, "honest_stand_in");
  HvzkSimulator s;
  s.label = "honest-stand-in";
  s.s_qubits = h.r_qubits;
  s.copy_budget = budget;
  for (const auto& row : h.rounds) {
    if (row.size() != 1) throw PreconditionError("honest_stand_in: honest prover depends on coins");
    s.ops.push_back(row[0]);
  }
  return s;
}

}  // namespace qzk
