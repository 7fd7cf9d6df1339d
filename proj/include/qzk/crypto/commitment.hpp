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
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qzk/core.hpp"

namespace qzk {

/// Canonical commitment: Com on (M, W) with M = n message qubits and
/// W = lambda ancillas in |0>. Output wire j of Com goes to C if listed in
/// c_wires, else to D. Opening applies Com^dagger and checks W = |0^lambda>.
struct CanonicalCommitment {
  std::string name;
  int n = 1, lambda = 0;
  Matrix com;
  std::vector<int> c_wires, d_wires;  // output wires of Com, in register order

  int width() const { return n + lambda; }
  int c_qubits() const { return static_cast<int>(c_wires.size()); }
  int d_qubits() const { return static_cast<int>(d_wires.size()); }

  void validate() const {
    check_cap(width(), name);
    if (static_cast<std::size_t>(com.rows()) != pow2(width()) || !is_unitary(com))
      throw PreconditionError(name + ": Com is not a unitary on M W");
    std::vector<int> all = c_wires;
    all.insert(all.end(), d_wires.begin(), d_wires.end());
    std::sort(all.begin(), all.end());
    for (int i = 0; i < width(); ++i)
      if (static_cast<int>(all.size()) != width() || all[i] != i)
        throw PreconditionError(name + ": C and D must partition the output wires");
  }

  /// The same scheme with the roles of C and D exchanged.
  CanonicalCommitment swapped() const {
    CanonicalCommitment s = *this;
    s.name = name + "/swapped";
    std::swap(s.c_wires, s.d_wires);
    return s;
  }

  /// Permutation taking Com's output wires to (C, D) order.
  std::vector<int> cd_order() const {
    std::vector<int> p = c_wires;
    p.insert(p.end(), d_wires.begin(), d_wires.end());
    return p;
  }

  /// Pi_1 = |0^lambda><0^lambda|_W x Id_M on Com's input wires.
  Matrix accept_projector() const {
    Matrix z = Matrix::Zero(pow2(lambda), pow2(lambda));
    z(0, 0) = 1;
    return kron(gates::I(n), z);
  }

  RegisterLayout cd_layout() const { return RegisterLayout{{"C", c_qubits()}, {"D", d_qubits()}}; }
};

/// Com = Id with no ancillas; C empty, D holds the message.
inline CanonicalCommitment identity_commitment(int n) {
  CanonicalCommitment c;
  c.name = "identity";
  c.n = n;
  c.com = gates::I(n);
  for (int i = 0; i < n; ++i) c.d_wires.push_back(i);
  return c;
}

/// One Bell pair (a_j, a'_j) per message qubit, then CNOT(a_j -> m_j).
/// C = (m, a), D = (a'). D is maximally mixed and message independent.
inline CanonicalCommitment bell_commitment(int n) {
  CanonicalCommitment c;
  c.name = "bell";
  c.n = n;
  c.lambda = 2 * n;
  const int w = 3 * n;
  // Wires: m_0..m_{n-1}, a_0..a_{n-1}, a'_0..a'_{n-1}.
  Matrix u = gates::I(w);
  for (int j = 0; j < n; ++j) {
    u = kernel::embed(gates::BellPrep(), w, {n + j, 2 * n + j}) * u;
    u = kernel::embed(gates::CNOT(), w, {n + j, j}) * u;
  }
  c.com = u;
  for (int i = 0; i < 2 * n; ++i) c.c_wires.push_back(i);
  for (int i = 2 * n; i < w; ++i) c.d_wires.push_back(i);
  return c;
}

/// Com = CNOT(m -> w1) then CNOT(w1 -> w2) on (m, w1, w2); C = (m), D = (w1, w2).
inline CanonicalCommitment cnot_chain_commitment() {
  CanonicalCommitment c;
  c.name = "cnot-chain";
  c.n = 1;
  c.lambda = 2;
  c.com = kernel::embed(gates::CNOT(), 3, {1, 2}) * kernel::embed(gates::CNOT(), 3, {0, 1});
  c.c_wires = {0};
  c.d_wires = {1, 2};
  return c;
}

/// Com(rho_M x |0^lambda>) arranged as (C, D).
inline MixedState commit(const CanonicalCommitment& c, const MixedState& m) {
  c.validate();
  if (m.layout().total_qubits() != c.n) throw DimensionError(c.name + ": message has the wrong number of qubits");
  Matrix anc = Matrix::Zero(pow2(c.lambda), pow2(c.lambda));
  anc(0, 0) = 1;
  Matrix out = c.com * kron(m.matrix(), anc) * c.com.adjoint();
  out = kernel::permute(out, c.width(), c.cd_order());
  return MixedState(0.5 * (out + out.adjoint()), c.cd_layout());
}

inline MixedState commit(const CanonicalCommitment& c, const PureState& m) { return commit(c, MixedState(m)); }

struct OpenResult {
  double accept = 0.0;
  std::optional<MixedState> message;  // M register after an accepted opening
};

/// Canonical verification of a state on (C, D).
inline OpenResult verify_open(const CanonicalCommitment& c, const MixedState& cd) {
  c.validate();
  if (cd.layout().total_qubits() != c.width()) throw DimensionError(c.name + ": opening has the wrong number of qubits");
  // Back to Com's wire order: wire cd_order()[i] sits at position i.
  const auto order = c.cd_order();
  std::vector<int> inv(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) inv[order[i]] = static_cast<int>(i);
  Matrix rho = kernel::permute(cd.matrix(), c.width(), inv);
  rho = c.com.adjoint() * rho * c.com;
  const Matrix pi = c.accept_projector();
  Matrix kept = pi * rho * pi;
  OpenResult r;
  r.accept = std::clamp(kept.trace().real(), 0.0, 1.0);
  if (r.accept > kZeroProb) {
    std::vector<int> mq;
    for (int i = 0; i < c.n; ++i) mq.push_back(i);
    r.message = MixedState::normalized(kernel::reduce(kept, c.width(), mq), RegisterLayout{{"M", c.n}});
  }
  return r;
}

/// Adversary for the double-opening game, on its private register E:
///  1. prepares `initial` on (E, C, D) and sends C D;
///  2. receives D, applies `middle` on (E, D), returns D;
///  3. receives C, D and M', measures `guess_one` on (E, C, D, M'); the
///     image of the projector is the guess b' = 1.
/// `abort_after_first` stops responding after step 1.
struct DoubleOpenAdversary {
  std::string label;
  int e_qubits = 0;
  Vector initial;
  Matrix middle;
  Matrix guess_one;
  bool abort_after_first = false;
};

struct DoubleOpenResult {
  bool aborted = false;
  bool win = false;
  int b = 0;
};

namespace detail {

/// Challenger state on (E, X, M') where X holds Com's wires in Com order.
struct DoubleOpenGame {
  const CanonicalCommitment& c;
  const DoubleOpenAdversary& a;
  int n_total = 0;
  std::vector<int> x, m_wires, w_wires, mp, e, d_pos;

  DoubleOpenGame(const CanonicalCommitment& com, const DoubleOpenAdversary& adv) : c(com), a(adv) {
    c.validate();
    n_total = a.e_qubits + c.width() + c.n;
    check_cap(n_total, "double-open game");
    for (int i = 0; i < a.e_qubits; ++i) e.push_back(i);
    for (int i = 0; i < c.width(); ++i) x.push_back(a.e_qubits + i);
    for (int i = 0; i < c.n; ++i) m_wires.push_back(x[i]);
    for (int i = c.n; i < c.width(); ++i) w_wires.push_back(x[i]);
    for (int i = 0; i < c.n; ++i) mp.push_back(a.e_qubits + c.width() + i);
    for (int j : c.d_wires) d_pos.push_back(x[j]);
    const std::size_t dim_ecd = pow2(a.e_qubits + c.width());
    if (static_cast<std::size_t>(a.initial.size()) != dim_ecd) throw RegisterError(a.label + ": initial state is not on (E, C, D)");
    if (static_cast<std::size_t>(a.middle.rows()) != pow2(a.e_qubits + c.d_qubits()))
      throw RegisterError(a.label + ": middle move does not act on (E, D)");
    if (static_cast<std::size_t>(a.guess_one.rows()) != pow2(n_total)) throw RegisterError(a.label + ": guess is not on (E, C, D, M')");
  }

  /// Adversary's (E, C, D) vector placed on (E, X, M' = 0).
  Vector start() const {
    // Adversary order (E, C, D) -> (E, X): X wire cd_order()[i] holds CD wire i.
    const auto order = c.cd_order();
    std::vector<int> perm(a.e_qubits + c.width());
    for (int i = 0; i < a.e_qubits; ++i) perm[i] = i;
    for (std::size_t i = 0; i < order.size(); ++i) perm[a.e_qubits + order[i]] = a.e_qubits + static_cast<int>(i);
    Vector v = kernel::permute(a.initial, a.e_qubits + c.width(), perm);
    return kron(v, basis_state(pow2(c.n), 0));
  }

  /// Opening check: Com^dagger, project W to 0. Returns the kept norm^2.
  double open(Vector& v) const {
    const double before = v.squaredNorm();
    kernel::apply(v, n_total, x, c.com.adjoint());
    Matrix z = Matrix::Zero(pow2(c.lambda), pow2(c.lambda));
    z(0, 0) = 1;
    if (c.lambda > 0) kernel::apply(v, n_total, w_wires, z);
    return before > 0 ? v.squaredNorm() / before : 0.0;
  }
  void swap_out(Vector& v) const { kernel::apply(v, n_total, concat(m_wires, mp), gates::SWAP(c.n)); }
  void recommit(Vector& v) const { kernel::apply(v, n_total, x, c.com); }
  void middle(Vector& v) const { kernel::apply(v, n_total, concat(e, d_pos), a.middle); }
  double guess_one_weight(const Vector& v) const {
    // guess_one is on (E, C, D, M'); move X to (C, D) order first.
    std::vector<int> wires = e;
    for (int j : c.c_wires) wires.push_back(x[j]);
    for (int j : c.d_wires) wires.push_back(x[j]);
    wires.insert(wires.end(), mp.begin(), mp.end());
    Vector u = v;
    kernel::apply(u, n_total, wires, a.guess_one);
    return std::clamp(std::real(v.dot(u)), 0.0, v.squaredNorm());
  }
  static std::vector<int> concat(std::vector<int> a, const std::vector<int>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
  }
};

}  // namespace detail

/// One sampled run of the double-opening experiment.
inline DoubleOpenResult run_double_open(const CanonicalCommitment& c, const DoubleOpenAdversary& adv, Rng& rng) {
  detail::DoubleOpenGame g(c, adv);
  if (!is_projector(adv.guess_one)) throw PreconditionError(adv.label + ": guess is not a projector");
  DoubleOpenResult r;
  Vector v = g.start();
  auto check = [&](Vector& s) {
    const double keep = g.open(s);
    if (!rng.bernoulli(keep)) return false;
    s /= std::sqrt(s.squaredNorm());
    return true;
  };
  r.aborted = true;
  if (!check(v)) return r;
  r.b = rng.bernoulli(0.5) ? 1 : 0;
  if (r.b == 1) g.swap_out(v);
  g.recommit(v);
  if (adv.abort_after_first) return r;
  g.middle(v);
  if (!check(v)) return r;
  r.aborted = false;
  if (r.b == 0) g.swap_out(v);
  g.recommit(v);
  const int guess = rng.bernoulli(g.guess_one_weight(v)) ? 1 : 0;
  r.win = guess == r.b;
  return r;
}

/// Projector onto "qubit q of n reads 1".
inline Matrix bit_is_one(int n, int q) {
  Matrix one = Matrix::Zero(2, 2);
  one(1, 1) = 1;
  return kernel::embed(one, n, {q});
}

/// E = one qubit in |+>, never touched; the guess is E measured.
inline DoubleOpenAdversary coin_guesser(const CanonicalCommitment& c) {
  DoubleOpenAdversary a;
  a.label = "coin";
  a.e_qubits = 1;
  a.initial = kron(Vector(gates::H() * basis_state(2, 0)), basis_state(pow2(c.width()), 0));
  a.middle = gates::I(1 + c.d_qubits());
  a.guess_one = bit_is_one(1 + c.width() + c.n, 0);
  return a;
}

/// Against Com = Id: commit to all ones, flip D in the middle, read M'.
inline DoubleOpenAdversary x_attack(const CanonicalCommitment& c) {
  DoubleOpenAdversary a;
  a.label = "x-attack";
  a.initial = basis_state(pow2(c.width()), pow2(c.width()) - 1);
  a.middle = kernel::embed(gates::X(), c.d_qubits(), {0});
  a.guess_one = bit_is_one(c.width() + c.n, c.width());
  return a;
}

/// Haar initial state and middle move, random half-rank guess.
inline DoubleOpenAdversary random_adversary(const CanonicalCommitment& c, Rng& rng) {
  DoubleOpenAdversary a;
  a.label = "random";
  a.e_qubits = 1;
  a.initial = random_vector(pow2(1 + c.width()), rng);
  a.middle = random_unitary(pow2(1 + c.d_qubits()), rng);
  a.guess_one = random_projector(pow2(1 + c.width() + c.n), pow2(c.width() + c.n), rng);
  return a;
}

struct DoubleOpenExact {
  double win = 0.0;    // unconditional; aborts are not wins
  double abort = 0.0;  // averaged over b
  double conditional_win() const { return abort < 1 ? win / (1 - abort) : 0.0; }
};

/// Exact win and abort probabilities of the experiment.
inline DoubleOpenExact double_open_exact(const CanonicalCommitment& c, const DoubleOpenAdversary& adv) {
  detail::DoubleOpenGame g(c, adv);
  DoubleOpenExact r;
  if (adv.abort_after_first) {
    r.abort = 1.0;
    return r;
  }
  for (int b = 0; b < 2; ++b) {
    Vector v = g.start();
    g.open(v);
    if (b == 1) g.swap_out(v);
    g.recommit(v);
    g.middle(v);
    g.open(v);
    if (b == 0) g.swap_out(v);
    g.recommit(v);
    const double kept = v.squaredNorm();
    const double one = g.guess_one_weight(v);
    r.win += 0.5 * (b == 1 ? one : kept - one);
    r.abort += 0.5 * (1 - kept);
  }
  return r;
}

}  // namespace qzk
