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

/// Per-copy coin histories of rounds 0..upto-1 encoded in a joint history.
/// Joint coin of round j is mixed radix over copies, copy 1 most significant.
inline std::vector<std::size_t> split_history(const InteractiveProtocol& base, int k, std::size_t joint, int upto) {
  std::vector<std::vector<int>> coins(k);
  for (int j = upto - 1; j >= 0; --j) {
    const auto c = static_cast<std::size_t>(base.coins(j));
    std::size_t cj = 1;
    for (int t = 0; t < k; ++t) cj *= c;
    std::size_t digit = joint % cj;
    joint /= cj;
    for (int t = k - 1; t >= 0; --t) {
      coins[t].push_back(static_cast<int>(digit % c));
      digit /= c;
    }
  }
  std::vector<std::size_t> h(k, 0);
  for (int t = 0; t < k; ++t)
    for (int j = 0; j < upto; ++j) h[t] = h[t] * base.coins(j) + coins[t][upto - 1 - j];
  return h;
}

/// Multi-controlled X: controls are the first k qubits, target the last.
inline Matrix multi_controlled_x(int k) {
  Matrix u = gates::X();
  for (int i = 0; i < k; ++i) u = gates::controlled(u);
  return u;
}

}  // namespace detail

/// k-fold parallel repetition. R = [R^1..R^k], W = [flag, W^1..W^k],
/// M = [M^1..M^k]. The verifier runs every copy and, in the last round,
/// sets flag to the AND of the copies' decision qubits.
inline CompiledProtocol parallel_repeat(const InteractiveProtocol& base, int k);

/// Copy t of the repeated protocol runs strategies[t] (one strategy is
/// reused for every copy).
inline ProverStrategy product_strategy(const CompiledProtocol& cp, const std::vector<ProverStrategy>& strategies) {
  const auto& base = cp.base();
  const int k = cp.copies;
  if (strategies.size() != 1 && static_cast<int>(strategies.size()) != k)
    throw PreconditionError("product_strategy: need 1 or " + std::to_string(k) + " strategies");
  if (k == 1) return strategies[0];
  auto at = [&](int t) -> const ProverStrategy& { return strategies.size() == 1 ? strategies[0] : strategies[t]; };
  int rq = 0;
  for (int t = 0; t < k; ++t) {
    base.check_strategy(at(t));
    rq += at(t).r_qubits;
  }
  const int n = rq + k * base.m_qubits;
  check_cap(n + cp.protocol.w_qubits, "product_strategy");
  // Copy t: R^t at its offset, M^t after all R.
  std::vector<std::vector<int>> qs(k);
  for (int t = 0, off = 0; t < k; off += at(t).r_qubits, ++t)
    qs[t] = concat(span(off, at(t).r_qubits), span(rq + t * base.m_qubits, base.m_qubits));
  ProverStrategy out;
  out.kind = ProverStrategy::Kind::Adversarial;
  out.label = "product:" + at(0).label;
  out.r_qubits = rq;
  for (int i = 0; i < base.rounds(); ++i) {
    bool shared = true;
    for (int t = 0; t < k; ++t) shared = shared && at(t).rounds[i].size() == 1;
    const std::size_t nh = shared ? 1 : cp.protocol.histories(static_cast<std::size_t>(i));
    std::vector<Matrix> row;
    for (std::size_t g = 0; g < nh; ++g) {
      const auto h = detail::split_history(base, k, g, i);
      Circuit c(n);
      for (int t = 0; t < k; ++t) c.add(at(t).op(i, h[t]), qs[t]);
      row.push_back(std::move(c.u));
    }
    out.rounds.push_back(std::move(row));
  }
  return out;
}

inline CompiledProtocol parallel_repeat(const InteractiveProtocol& base, int k) {
  base.validate();
  if (k < 1) throw PreconditionError("parallel_repeat: need k >= 1");
  CompiledProtocol cp;
  cp.stage = Stage::Repeated;
  cp.underlying = {base};
  cp.base_rounds = base.rounds();
  cp.copies = k;
  cp.soundness = [k](double zeta) { return repeated_soundness(zeta, k); };
  if (k == 1) {
    cp.protocol = base;
    cp.registers = {{"R", span(0, base.r_qubits)}, {"W", span(base.r_qubits, base.w_qubits)},
                    {"M", span(base.r_qubits + base.w_qubits, base.m_qubits)}};
    return cp;
  }
  const int rb = base.r_qubits, wb = base.w_qubits, mb = base.m_qubits;
  const int np = k * rb, nw = 1 + k * wb, nm = k * mb, nv = nw + nm;
  check_cap(np + nv, "parallel_repeat");
  auto& p = cp.protocol;
  p.name = base.name + "^" + std::to_string(k);
  p.r_qubits = np;
  p.w_qubits = nw;
  p.m_qubits = nm;
  bool coins = false;
  for (int i = 0; i < base.rounds(); ++i) {
    int c = 1;
    for (int t = 0; t < k; ++t) c *= base.coins(i);
    p.coin_outcomes.push_back(c);
    coins = coins || c > 1;
  }
  if (!coins) p.coin_outcomes.clear();

  // Verifier-space wires of copy t: W^t then M^t.
  std::vector<std::vector<int>> vq(k);
  std::vector<int> decide;
  for (int t = 0; t < k; ++t) {
    vq[t] = concat(span(1 + t * wb, wb), span(nw + t * mb, mb));
    decide.push_back(1 + t * wb);
  }
  for (int i = 0; i < base.rounds(); ++i) {
    bool shared = base.verifier[i].size() == 1;
    const std::size_t nh = shared ? 1 : p.histories(static_cast<std::size_t>(i) + 1);
    std::vector<Matrix> row;
    for (std::size_t g = 0; g < nh; ++g) {
      const auto h = detail::split_history(base, k, g, i + 1);
      Circuit c(nv);
      for (int t = 0; t < k; ++t) c.add(base.verifier_op(i, h[t]), vq[t]);
      if (i + 1 == base.rounds()) c.add(detail::multi_controlled_x(k), concat(decide, {0}));
      row.push_back(std::move(c.u));
    }
    p.verifier.push_back(std::move(row));
  }

  // Initial: copies side by side as (R W M)^k with flag in front, then reorder.
  Vector v = basis_state(2, 0);
  for (int t = 0; t < k; ++t) v = kron(v, base.initial);
  const int n = np + nv, nb = rb + wb + mb;
  std::vector<int> perm;  // new qubit -> old qubit
  for (int t = 0; t < k; ++t)
    for (int q = 0; q < rb; ++q) perm.push_back(1 + t * nb + q);
  perm.push_back(0);
  for (int t = 0; t < k; ++t)
    for (int q = 0; q < wb; ++q) perm.push_back(1 + t * nb + rb + q);
  for (int t = 0; t < k; ++t)
    for (int q = 0; q < mb; ++q) perm.push_back(1 + t * nb + rb + wb + q);
  p.initial = kernel::permute(v, n, perm);

  cp.registers = {{"flag", {np}}};
  for (int t = 0; t < k; ++t) {
    const auto s = std::to_string(t + 1);
    cp.registers.push_back({"R" + s, span(t * rb, rb)});
    cp.registers.push_back({"W" + s, span(np + 1 + t * wb, wb)});
    cp.registers.push_back({"M" + s, span(np + nw + t * mb, mb)});
  }
  if (base.honest) {
    p.honest = product_strategy(cp, {*base.honest});
    p.honest->kind = ProverStrategy::Kind::Honest;
    p.honest->label = "honest";
  }
  p.validate();
  return cp;
}

}  // namespace qzk
