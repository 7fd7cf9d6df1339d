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

#include <array>

#include "qzk/compilers/common.hpp"
#include "qzk/core/swap_test.hpp"

namespace qzk {

namespace detail {

/// Wire map of the public-coin protocol for a 3-message base.
///   R = [Rpsi, Rb]          prover's copy of psi_v, base prover register
///   W = [flag, Copy, Keep]  decision, verifier's copy of psi_v, stored W
///   M = [Wb, Mb]            base W in transit, base M
struct PublicCoinLayout {
  int w = 0, rb = 0, m = 0;
  int np = 0, nw = 0, nm = 0;

  PublicCoinLayout(int rq, int wq, int mq) : w(wq), rb(rq), m(mq), np(wq + rq), nw(1 + 2 * wq), nm(wq + mq) {}
  int total() const { return np + nw + nm; }
  std::vector<int> Rpsi() const { return span(0, w); }
  std::vector<int> Rb() const { return span(w, rb); }
  int flag() const { return np; }
  std::vector<int> Copy() const { return span(np + 1, w); }
  std::vector<int> Keep() const { return span(np + 1 + w, w); }
  std::vector<int> Wb() const { return span(np + nw, w); }
  std::vector<int> Mb() const { return span(np + nw + w, m); }
};

inline void require_three_message(const InteractiveProtocol& p, const char* what) {
  if (p.rounds() != 2) throw PreconditionError(std::string(what) + ": base must have 3 messages");
}

}  // namespace detail

/// Prover for the public-coin protocol built from base unitaries P_1, P_2 on
/// (S, M): message 1 sends its copy of psi_v as W after running P_1 and V_1;
/// on b = 0 it applies P_2, on b = 1 it does nothing.
inline ProverStrategy public_coin_strategy(const CompiledProtocol& cp, const std::vector<Matrix>& ops, int s_qubits,
                                           const std::string& label) {
  const auto& base = cp.base();
  if (ops.size() != 2) throw PreconditionError("public_coin_strategy: need two base unitaries");
  for (const auto& u : ops)
    if (static_cast<std::size_t>(u.rows()) != pow2(s_qubits + base.m_qubits) || !is_unitary(u, 1e-8))
      throw PreconditionError("public_coin_strategy: base op is not a unitary on (S, M)");
  const int w = base.w_qubits, m = base.m_qubits;
  // Prover space: Rpsi, S, Wb, Mb.
  const int n = w + s_qubits + w + m;
  const auto rpsi = span(0, w), s = span(w, s_qubits), wb = span(w + s_qubits, w), mb = span(2 * w + s_qubits, m);
  Circuit one(n);
  one.swap(rpsi, wb).add(ops[0], concat(s, mb)).add(base.verifier_op(0, 0), concat(wb, mb));
  Circuit two(n);
  two.add(ops[1], concat(s, mb));
  ProverStrategy out;
  out.label = "public-coin:" + label;
  out.r_qubits = w + s_qubits;
  out.rounds = {{one.u}, {two.u, gates::I(n)}};
  return out;
}

inline ProverStrategy public_coin_strategy(const CompiledProtocol& cp, const ProverStrategy& s) {
  cp.base().check_strategy(s);
  for (const auto& row : s.rounds)
    if (row.size() != 1) throw PreconditionError("public_coin_strategy: base strategy depends on coins");
  return public_coin_strategy(cp, {s.rounds[0][0], s.rounds[1][0]}, s.r_qubits, s.label);
}

/// Stage III: 3-message base with unitary, coinless verifier and initial
/// state |0>_R psi_v |0>_M becomes a public-coin protocol. Round 1: the
/// verifier stores the received W in Keep and flips b. Round 2, b = 0:
/// V_2 on (Keep, Mb), decision copied to flag. b = 1: V_1^dagger on
/// (Keep, Mb), then SWAP test of Keep against Copy; pass sets flag.
inline CompiledProtocol make_public_coin(const InteractiveProtocol& base) {
  base.validate();
  detail::require_three_message(base, "make_public_coin");
  detail::require_no_coins(base, "make_public_coin");
  detail::require_unitary_verifier(base, "make_public_coin");
  const Vector psi = detail::verifier_initial(base);
  const detail::PublicCoinLayout L(base.r_qubits, base.w_qubits, base.m_qubits);
  check_cap(L.total(), "make_public_coin");

  CompiledProtocol cp;
  cp.stage = Stage::PublicCoin;
  cp.underlying = {base};
  cp.base_rounds = 2;
  cp.soundness = [](double zeta) { return public_coin_soundness(zeta); };
  auto& p = cp.protocol;
  p.name = base.name + "/III";
  p.r_qubits = L.np;
  p.w_qubits = L.nw;
  p.m_qubits = L.nm;
  p.coin_outcomes = {2, 1};

  const int off = L.np, nv = L.nw + L.nm;
  auto at = [&](const std::vector<int>& q) { return detail::shift(q, off); };
  const int flag = L.flag() - off;
  Circuit store(nv);
  store.swap(at(L.Wb()), at(L.Keep()));
  Circuit zero(nv);
  zero.add(base.verifier_op(1, 0), at(concat(L.Keep(), L.Mb()))).add(gates::CNOT(), {at(L.Keep())[0], flag});
  Circuit one(nv);
  one.add(base.verifier_op(0, 0).adjoint(), at(concat(L.Keep(), L.Mb())));
  one.add(gates::H(), {flag}).add(gates::CSWAP(base.w_qubits), concat(concat({flag}, at(L.Keep())), at(L.Copy())));
  one.add(gates::H(), {flag}).add(gates::X(), {flag});
  p.verifier = {{store.u}, {zero.u, one.u}};

  Vector v = kron(psi, basis_state(pow2(L.rb + 1), 0));
  v = kron(kron(v, psi), basis_state(pow2(L.w + L.nm), 0));
  p.initial = v;

  cp.registers = {{"Rpsi", L.Rpsi()}, {"Rb", L.Rb()}, {"flag", {L.flag()}}, {"Copy", L.Copy()},
                  {"Keep", L.Keep()}, {"Wb", L.Wb()},  {"Mb", L.Mb()}};
  if (base.honest) {
    p.honest = public_coin_strategy(cp, *base.honest);
    p.honest->kind = ProverStrategy::Kind::Honest;
  }
  p.validate();
  return cp;
}

/// Acceptance for b = 0 and b = 1.
inline std::array<double, 2> public_coin_branch_values(const CompiledProtocol& cp, const ProverStrategy& s) {
  if (cp.stage != Stage::PublicCoin && cp.stage != Stage::Malicious) throw PreconditionError("public_coin_branch_values: not a public-coin protocol");
  return {run_protocol_with_coins(cp.protocol, s, {0, 0}), run_protocol_with_coins(cp.protocol, s, {1, 0})};
}

/// Verifier's view of one run: the (Keep, Mb) state after message 2 and,
/// per challenge b, after message 3, plus the acceptance per challenge.
struct PublicCoinView {
  MixedState stored;
  std::array<MixedState, 2> reply;
  std::array<double, 2> accept{};
};

namespace detail {

inline std::vector<int> keep_mb_in_view(const PublicCoinLayout& L) {
  return shift(concat(L.Keep(), L.Mb()), L.np);
}

inline RegisterLayout keep_mb_layout(const InteractiveProtocol& base) {
  std::vector<Register> regs{{"Keep", base.w_qubits}};
  if (base.m_qubits > 0) regs.push_back({"Mb", base.m_qubits});
  return RegisterLayout(regs);
}

}  // namespace detail

/// Exact view of the verifier against prover s.
inline PublicCoinView public_coin_real_view(const CompiledProtocol& cp, const ProverStrategy& s) {
  const auto& p = cp.protocol;
  const auto& base = cp.base();
  p.check_strategy(s);
  const detail::PublicCoinLayout L(base.r_qubits, base.w_qubits, base.m_qubits);
  const auto w = detail::wires_for(p, s.r_qubits);
  std::vector<int> keep;
  for (int q : detail::keep_mb_in_view(L)) keep.push_back(q + s.r_qubits);
  const auto layout = detail::keep_mb_layout(base);
  auto view = [&](const Vector& v) {
    Matrix r = kernel::reduce(v, w.n, keep);
    return MixedState::normalized(0.5 * (r + r.adjoint()), layout);
  };
  Vector v = p.initial_with_prover(s.r_qubits);
  kernel::apply(v, w.n, w.prover, s.op(0, 0));
  kernel::apply(v, w.n, w.verifier, p.verifier_op(0, 0));
  PublicCoinView out{view(v), {view(v), view(v)}, {}};
  for (int b = 0; b < 2; ++b) {
    Vector u = v;
    kernel::apply(u, w.n, w.prover, s.op(1, static_cast<std::size_t>(b)));
    out.reply[b] = view(u);
    kernel::apply(u, w.n, w.verifier, p.verifier_op(1, static_cast<std::size_t>(b)));
    out.accept[b] = detail::accept_weight(u, w.n, s.r_qubits);
  }
  return out;
}

struct PublicCoinSimulation {
  PublicCoinView view;
  SwapTestResult check;  // b = 1 SWAP test of the returned W against psi_v
};

/// Honest-verifier simulation from base simulator unitaries S_1, S_2, run
/// on the base protocol only: b = 0 replays S_1, V_1, S_2; b = 1 returns
/// V_1 S_1 psi_v, and its acceptance is the SWAP test of V_1^dagger of that
/// state against psi_v.
inline PublicCoinSimulation hv_simulate_public_coin(const CompiledProtocol& cp, const HvzkSimulator& sim) {
  if (cp.stage != Stage::PublicCoin && cp.stage != Stage::Malicious) throw PreconditionError("hv_simulate_public_coin: not a public-coin protocol");
  const auto& base = cp.base();
  sim.validate(base);
  const auto w = detail::wires_for(base, sim.s_qubits);
  std::vector<int> keep;
  for (int q = sim.s_qubits; q < w.n; ++q) keep.push_back(q);
  const auto layout = detail::keep_mb_layout(base);
  auto view = [&](const Vector& v) {
    Matrix r = kernel::reduce(v, w.n, keep);
    return MixedState::normalized(0.5 * (r + r.adjoint()), layout);
  };
  const Vector psi = detail::verifier_initial(base);
  Vector v = base.initial_with_prover(sim.s_qubits);
  kernel::apply(v, w.n, w.prover, sim.ops[0]);
  const Vector before = v;
  kernel::apply(v, w.n, w.verifier, base.verifier_op(0, 0));
  PublicCoinSimulation out{{view(v), {view(v), view(v)}, {}}, {}};
  Vector u = v;
  kernel::apply(u, w.n, w.prover, sim.ops[1]);
  out.view.reply[0] = view(u);
  kernel::apply(u, w.n, w.verifier, base.verifier_op(1, 0));
  out.view.accept[0] = detail::accept_weight(u, w.n, sim.s_qubits);
  std::vector<int> wq;
  for (int q = 0; q < base.w_qubits; ++q) wq.push_back(sim.s_qubits + q);
  Matrix rw = kernel::reduce(before, w.n, wq);
  const RegisterLayout lw{{"Keep", base.w_qubits}};
  out.check = swap_test(MixedState::normalized(0.5 * (rw + rw.adjoint()), lw), PureState(psi, lw));
  out.view.accept[1] = out.check.accept;
  return out;
}

}  // namespace qzk
