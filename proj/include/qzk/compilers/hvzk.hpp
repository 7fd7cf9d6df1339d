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
#include "qzk/crypto/commitment.hpp"

namespace qzk {

/// Base strategy acting on R and M_base, identity on C.
inline ProverStrategy lift_to_hvzk(const CompiledProtocol& cp, const ProverStrategy& s) {
  const auto& base = cp.base();
  base.check_strategy(s);
  ProverStrategy out = s;
  out.label = s.label + "/lifted";
  const int n = s.r_qubits + cp.protocol.m_qubits;
  const auto qs = span(0, s.r_qubits + base.m_qubits);
  for (auto& row : out.rounds)
    for (auto& u : row) u = kernel::embed(u, n, qs);
  return out;
}

/// Stage I in the ideal model. Registers: R (base R), W = [Out, D],
/// M = [M_base, C]. The initial state holds Com(W_base E) split into C and D.
/// Round i: the prover acts on R, M_base and C; the functionality applies
/// Com^dagger to C D, checks E = |0> (abort otherwise), applies V_i to
/// W_base M_base, then recommits, or in the final round copies the first
/// W_base qubit into Out.
inline CompiledProtocol compile_hvzk(const InteractiveProtocol& base, const CanonicalCommitment& com) {
  base.validate();
  com.validate();
  if (com.n != base.w_qubits) throw DimensionError("compile_hvzk: commitment message size differs from W");
  const int rb = base.r_qubits, wb = base.w_qubits, mb = base.m_qubits;
  const int c = com.c_qubits(), d = com.d_qubits();
  const int nw = 1 + d, nm = mb + c, nv = nw + nm;
  check_cap(rb + nv, "compile_hvzk");

  // Verifier-space positions: Out, D, M_base, C.
  const int out = 0;
  const auto dpos = span(1, d), mpos = span(1 + d, mb), cpos = span(1 + d + mb, c);
  // Com output wire j -> verifier-space position.
  std::vector<int> com_wires(com.width());
  {
    int ci = 0, di = 0;
    for (int j = 0; j < com.width(); ++j) {
      const bool in_c = std::find(com.c_wires.begin(), com.c_wires.end(), j) != com.c_wires.end();
      com_wires[j] = in_c ? cpos[ci++] : dpos[di++];
    }
  }
  const std::vector<int> wpos(com_wires.begin(), com_wires.begin() + wb);
  const Matrix check = com.accept_projector();

  CompiledProtocol cp;
  cp.stage = Stage::HonestVerifier;
  cp.underlying = {base};
  cp.base_rounds = base.rounds();
  cp.soundness = [](double zeta) { return zeta; };
  auto& p = cp.protocol;
  p.name = base.name + "/I[" + com.name + "]";
  p.r_qubits = rb;
  p.w_qubits = nw;
  p.m_qubits = nm;
  p.coin_outcomes = base.coin_outcomes;
  for (int i = 0; i < base.rounds(); ++i) {
    std::vector<Matrix> row;
    for (const auto& v : base.verifier[i]) {
      Circuit k(nv);
      k.add(com.com.adjoint(), com_wires).add(check, com_wires).add(v, concat(wpos, mpos));
      if (i + 1 < base.rounds())
        k.add(com.com, com_wires);
      else
        k.add(gates::CNOT(), {wpos[0], out});
      row.push_back(std::move(k.u));
    }
    p.verifier.push_back(std::move(row));
  }
  // Initial: base (R, W_base, M_base) with E = |0>, Out = |0>, then Com.
  {
    const int n = rb + nv;
    // Work order: R, Out, [Com input wires W_base E at com_wires], M_base.
    Vector v = Vector::Zero(pow2(n));
    const std::size_t dm = pow2(mb), dw = pow2(wb);
    for (std::size_t ri = 0; ri < pow2(rb); ++ri)
      for (std::size_t wi = 0; wi < dw; ++wi)
        for (std::size_t mi = 0; mi < dm; ++mi) {
          const cplx a = base.initial[(ri * dw + wi) * dm + mi];
          if (a == cplx(0)) continue;
          std::size_t idx = ri << nv;
          for (int j = 0; j < wb; ++j)
            if (wi >> (wb - 1 - j) & 1) idx |= std::size_t{1} << (nv - 1 - wpos[j]);
          for (int j = 0; j < mb; ++j)
            if (mi >> (mb - 1 - j) & 1) idx |= std::size_t{1} << (nv - 1 - mpos[j]);
          v[static_cast<Eigen::Index>(idx)] = a;
        }
    std::vector<int> q;
    for (int w : com_wires) q.push_back(rb + w);
    kernel::apply(v, n, q, com.com);
    p.initial = v;
  }
  if (base.honest) p.honest = lift_to_hvzk(cp, *base.honest);
  cp.registers = {{"R", span(0, rb)}, {"Out", {rb + out}}, {"D", span(rb + 1, d)}, {"M", span(rb + 1 + d, mb)}, {"C", span(rb + 1 + d + mb, c)}};
  p.validate();
  return cp;
}

}  // namespace qzk
