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

#include "qzk/compilers/common.hpp"

namespace qzk {

namespace detail {

/// Wire map of the collapsed protocol for an r-round base.
///   R = [R_1..R_r, C_2..C_r]   prover registers and its copies of psi_v
///   W = [B, W_1, S_2..S_r]     Bell half, first workspace, storage
///   M = [X_2..X_r, M_1..M_r]   workspaces in transit, message registers
/// Indices are absolute; B' is the first qubit of X_2.
struct CollapseLayout {
  int r = 0, rb = 0, w = 0, m = 0;
  int np = 0, nw = 0, nm = 0;

  CollapseLayout(int rounds, int rq, int wq, int mq) : r(rounds), rb(rq), w(wq), m(mq) {
    np = r * rb + (r - 1) * w;
    nw = 1 + r * w;
    nm = (r - 1) * w + r * m;
  }
  int total() const { return np + nw + nm; }
  std::vector<int> R(int k) const { return span((k - 1) * rb, rb); }
  std::vector<int> C(int k) const { return span(r * rb + (k - 2) * w, w); }
  int B() const { return np; }
  std::vector<int> W(int k) const { return k == 1 ? span(np + 1, w) : span(np + 1 + w + (k - 2) * w, w); }
  std::vector<int> X(int k) const { return span(np + nw + (k - 2) * w, w); }
  std::vector<int> M(int k) const { return span(np + nw + (r - 1) * w + (k - 1) * m, m); }
  int Bp() const { return np + nw; }
};

}  // namespace detail

/// Prover for the collapsed protocol built from per-round unitaries on
/// (S, M) with S = R of each copy (the honest prover, or an HVZK simulator).
/// Message 1: copy k is run through S_1, V_1, ..., S_k on (R_k, C_k, M_k)
/// and C_k is sent as W_k. Message 3 for challenge i: S_{i+1} on
/// (R_i, M_i), then SWAP (R_i M_i) with (R_{i+1} M_{i+1}) controlled on B'.
inline ProverStrategy collapsed_strategy(const CompiledProtocol& cp, const HvzkSimulator& sim) {
  const auto& base = cp.base();
  sim.validate(base);
  if (sim.s_qubits != base.r_qubits) throw RegisterError("collapsed_strategy: simulator register must match R of the base");
  const int r = cp.base_rounds;
  const detail::CollapseLayout L(r, base.r_qubits, base.w_qubits, base.m_qubits);
  // Prover space: R (np qubits) then M (nm qubits); absolute M index a maps to a - nw.
  const int n = L.np + L.nm;
  auto pm = [&](const std::vector<int>& abs) {
    std::vector<int> q;
    for (int a : abs) q.push_back(a >= L.np ? a - L.nw : a);
    return q;
  };
  auto V = [&](int k) -> const Matrix& { return base.verifier_op(static_cast<std::size_t>(k - 1), 0); };
  Circuit one(n);
  for (int k = 1; k <= r; ++k) {
    for (int j = 1; j <= k; ++j) {
      one.add(sim.ops[j - 1], pm(concat(L.R(k), L.M(k))));
      if (j < k) one.add(V(j), pm(concat(L.C(k), L.M(k))));
    }
    if (k >= 2) one.swap(pm(L.C(k)), pm(L.X(k)));
  }
  std::vector<Matrix> third;
  for (int i = 1; i <= r - 1; ++i) {
    Circuit t(n);
    t.add(sim.ops[i], pm(concat(L.R(i), L.M(i))));
    const int blk = base.r_qubits + base.m_qubits;
    t.add(gates::CSWAP(blk), pm(concat(concat({L.Bp()}, concat(L.R(i), L.M(i))), concat(L.R(i + 1), L.M(i + 1)))));
    third.push_back(std::move(t.u));
  }
  ProverStrategy s;
  s.label = "collapsed:" + sim.label;
  s.r_qubits = L.np;
  s.rounds = {{one.u}, std::move(third)};
  return s;
}

/// Stage II: the r-round base becomes a 3-message protocol. Round 1 coin is
/// the challenge i - 1, uniform on {0..r-2}.
///
/// V_1(i): move X_k into S_k; check Pi_1 = V_r^dagger (|1><1| x Id) V_r on
/// W_r M_r (abort otherwise); prepare B B' in a Bell pair; apply V_i to
/// W_i M_i; SWAP W_i, W_{i+1} controlled on B. All M_k and B' go back to
/// the prover. V_2: CNOT(B -> B'), H on B, X on B; accept iff B = 1, i.e.
/// the Hadamard measurement of B gave +.
inline CompiledProtocol collapse_rounds(const InteractiveProtocol& base) {
  base.validate();
  detail::require_no_coins(base, "collapse_rounds");
  detail::require_unitary_verifier(base, "collapse_rounds");
  const int r = base.rounds();
  if (r < 2) throw PreconditionError("collapse_rounds: need at least 2 rounds");
  const Vector psi = detail::verifier_initial(base);
  const detail::CollapseLayout L(r, base.r_qubits, base.w_qubits, base.m_qubits);
  check_cap(L.total(), "collapse_rounds");

  CompiledProtocol cp;
  cp.stage = Stage::Collapsed;
  cp.underlying = {base};
  cp.base_rounds = r;
  cp.soundness = [r](double zeta) { return collapsed_soundness(zeta, r); };
  auto& p = cp.protocol;
  p.name = base.name + "/II";
  p.r_qubits = L.np;
  p.w_qubits = L.nw;
  p.m_qubits = L.nm;
  p.coin_outcomes = {r - 1, 1};

  const int off = L.np, nv = L.nw + L.nm;
  auto V = [&](int k) -> const Matrix& { return base.verifier_op(static_cast<std::size_t>(k - 1), 0); };
  const Matrix pi1 = V(r).adjoint() * first_qubit_one(base.w_qubits + base.m_qubits) * V(r);
  std::vector<Matrix> first;
  for (int i = 1; i <= r - 1; ++i) {
    Circuit k(nv);
    for (int j = 2; j <= r; ++j) k.swap(detail::shift(L.X(j), off), detail::shift(L.W(j), off));
    k.add(pi1, detail::shift(concat(L.W(r), L.M(r)), off));
    k.add(gates::H(), {L.B() - off}).add(gates::CNOT(), {L.B() - off, L.Bp() - off});
    k.add(V(i), detail::shift(concat(L.W(i), L.M(i)), off));
    k.add(gates::CSWAP(base.w_qubits), detail::shift(concat(concat({L.B()}, L.W(i)), L.W(i + 1)), off));
    first.push_back(std::move(k.u));
  }
  Circuit last(nv);
  last.add(gates::CNOT(), {L.B() - off, L.Bp() - off}).add(gates::H(), {L.B() - off}).add(gates::X(), {L.B() - off});
  p.verifier = {std::move(first), {last.u}};

  // Initial: C_k and W_1 hold psi_v, everything else |0>.
  Vector v = Vector::Ones(1);
  v = kron(v, basis_state(pow2(r * L.rb), 0));
  for (int k = 2; k <= r; ++k) v = kron(v, psi);
  v = kron(v, basis_state(2, 0));
  v = kron(v, psi);
  v = kron(v, basis_state(pow2((r - 1) * L.w + L.nm), 0));
  p.initial = v;

  cp.registers = {{"B", {L.B()}}, {"B'", {L.Bp()}}};
  for (int k = 1; k <= r; ++k) {
    cp.registers.push_back({"R" + std::to_string(k), L.R(k)});
    cp.registers.push_back({"W" + std::to_string(k), L.W(k)});
    cp.registers.push_back({"M" + std::to_string(k), L.M(k)});
    if (k >= 2) {
      cp.registers.push_back({"C" + std::to_string(k), L.C(k)});
      cp.registers.push_back({"X" + std::to_string(k), L.X(k)});
    }
  }
  if (base.honest) {
    p.honest = collapsed_strategy(cp, honest_stand_in(base));
    p.honest->kind = ProverStrategy::Kind::Honest;
  }
  p.validate();
  return cp;
}

struct BranchOverlap {
  double pass = 0;      // probability of passing the Pi_1 check
  double direct = 0;    // acceptance given the check passed, from the protocol run
  double formula = 0;   // 1/2 + 1/2 Re <psi_0|psi_1>
};

/// For challenge i (1-based), the acceptance given the Pi_1 check passed,
/// computed from the run and from the branch states psi_b = sqrt(2) <b|_B
/// after the CNOT(B -> B').
inline BranchOverlap collapsed_branch_overlap(const CompiledProtocol& cp, const ProverStrategy& s, int i) {
  if (cp.stage != Stage::Collapsed) throw PreconditionError("collapsed_branch_overlap: not a collapsed protocol");
  const auto& p = cp.protocol;
  if (i < 1 || i >= cp.base_rounds) throw PreconditionError("collapsed_branch_overlap: challenge out of range");
  p.check_strategy(s);
  const auto w = detail::wires_for(p, s.r_qubits);
  Vector v = p.initial_with_prover(s.r_qubits);
  kernel::apply(v, w.n, w.prover, s.op(0, 0));
  kernel::apply(v, w.n, w.verifier, p.verifier_op(0, static_cast<std::size_t>(i - 1)));
  BranchOverlap out;
  out.pass = v.squaredNorm();
  if (out.pass < kZeroProb) return out;
  v /= std::sqrt(out.pass);
  kernel::apply(v, w.n, w.prover, s.op(1, static_cast<std::size_t>(i - 1)));
  const int shift_b = s.r_qubits - p.r_qubits;
  const int b = cp.wires("B")[0] + shift_b, bp = cp.wires("B'")[0] + shift_b;
  kernel::apply(v, w.n, {b, bp}, gates::CNOT());
  const std::size_t bit = std::size_t{1} << (w.n - 1 - b);
  cplx ip = 0;
  for (Eigen::Index x = 0; x < v.size(); ++x)
    if (!(static_cast<std::size_t>(x) & bit)) ip += std::conj(v[x]) * v[static_cast<Eigen::Index>(static_cast<std::size_t>(x) | bit)];
  out.formula = 0.5 + ip.real();  // <psi_0|psi_1> = 2 <v_0|v_1>
  out.direct = run_protocol_with_coins(p, s, {i - 1, 0}) / out.pass;
  return out;
}

struct CollapsedTranscript {
  int challenge = 1;
  std::vector<MixedState> messages;  // verifier views after messages 1..3 (W M)
  double bell_check = 0;             // final check acceptance given the Pi_1 check passed
  double factorization_residual = 0; // || v - Phi+ (x) <Phi+|v> || before the check
};

/// Simulated 3-message transcript for challenge i from base simulator
/// unitaries: the simulator's messages are the collapsed prover built from
/// S_1..S_r, run against the honest verifier.
inline CollapsedTranscript hv_simulate_collapsed(const CompiledProtocol& cp, const HvzkSimulator& sim, int i) {
  if (cp.stage != Stage::Collapsed) throw PreconditionError("hv_simulate_collapsed: not a collapsed protocol");
  if (i < 1 || i >= cp.base_rounds) throw PreconditionError("hv_simulate_collapsed: challenge out of range");
  if (sim.copy_budget < cp.base_rounds - 1) throw PreconditionError("hv_simulate_collapsed: copy budget exhausted");
  const auto s = collapsed_strategy(cp, sim);
  const auto& p = cp.protocol;
  const auto w = detail::wires_for(p, s.r_qubits);
  std::vector<int> keep;
  for (int q = s.r_qubits; q < w.n; ++q) keep.push_back(q);
  auto view = [&](const Vector& v) {
    const double nrm = v.squaredNorm();
    Matrix r = kernel::reduce(Vector(v / std::sqrt(nrm)), w.n, keep);
    return MixedState::normalized(0.5 * (r + r.adjoint()), p.layout_with_prover(0));
  };
  CollapsedTranscript t;
  t.challenge = i;
  Vector v = p.initial_with_prover(s.r_qubits);
  kernel::apply(v, w.n, w.prover, s.op(0, 0));
  t.messages.push_back(view(v));
  kernel::apply(v, w.n, w.verifier, p.verifier_op(0, static_cast<std::size_t>(i - 1)));
  const double pass = v.squaredNorm();
  if (pass < kZeroProb) throw PreconditionError("hv_simulate_collapsed: simulated first message never passes the check");
  v /= std::sqrt(pass);
  t.messages.push_back(view(v));
  kernel::apply(v, w.n, w.prover, s.op(1, static_cast<std::size_t>(i - 1)));
  t.messages.push_back(view(v));
  // Project B B' on Phi+ to measure the residual.
  const int b = cp.wires("B")[0], bp = cp.wires("B'")[0];
  Vector phi = Vector::Zero(4);
  phi(0) = phi(3) = 1 / std::sqrt(2.0);
  Vector u = v;
  kernel::apply(u, w.n, {b, bp}, phi * phi.adjoint());
  t.factorization_residual = (v - u).norm();
  t.bell_check = run_protocol_with_coins(p, s, {i - 1, 0}) / pass;
  return t;
}

}  // namespace qzk
