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

#include <functional>
#include <optional>
#include <string>
#include <utility>

#include "qzk/core.hpp"

namespace qzk {

/// Channel F: A B -> A~ B~ given as a unitary on (A, B, ancilla |0>) whose
/// output wires are split as (A~, B~, discarded), in that order.
struct IdealFunctionality {
  std::string name;
  int a_qubits = 0, b_qubits = 0, ancilla_qubits = 0;
  int out_a_qubits = 0, out_b_qubits = 0;
  Matrix unitary;

  int total_qubits() const { return a_qubits + b_qubits + ancilla_qubits; }

  void validate() const {
    const int n = total_qubits();
    check_cap(n, name);
    if (static_cast<std::size_t>(unitary.rows()) != pow2(n) || !is_unitary(unitary))
      throw PreconditionError(name + ": functionality is not a unitary on A B ancilla");
    if (out_a_qubits < 0 || out_b_qubits < 0 || out_a_qubits + out_b_qubits > n)
      throw PreconditionError(name + ": output registers exceed the circuit width");
  }

  /// Joint output on (A~, B~) for an input on (A, B).
  Matrix apply(const Matrix& rho_ab) const {
    const std::size_t dab = pow2(a_qubits + b_qubits);
    if (static_cast<std::size_t>(rho_ab.rows()) != dab) throw DimensionError(name + ": input does not match the signature");
    Matrix anc = Matrix::Zero(pow2(ancilla_qubits), pow2(ancilla_qubits));
    anc(0, 0) = 1;
    Matrix full = unitary * kron(rho_ab, anc) * unitary.adjoint();
    std::vector<int> keep;
    for (int q = 0; q < out_a_qubits + out_b_qubits; ++q) keep.push_back(q);
    Matrix out = kernel::reduce(full, total_qubits(), keep);
    return 0.5 * (out + out.adjoint());
  }

  RegisterLayout output_layout() const { return RegisterLayout{{"A~", out_a_qubits}, {"B~", out_b_qubits}}; }
};

/// Identity functionality on (A, B).
inline IdealFunctionality identity_functionality(int a_qubits, int b_qubits) {
  IdealFunctionality f;
  f.name = "identity";
  f.a_qubits = f.out_a_qubits = a_qubits;
  f.b_qubits = f.out_b_qubits = b_qubits;
  f.unitary = gates::I(a_qubits + b_qubits);
  return f;
}

/// Coin functionality: inputs bits a, b; both parties receive a XOR b.
/// Wires (A, B, anc): CNOT(A -> B), CNOT(B -> anc); outputs (anc, B).
inline IdealFunctionality xor_functionality() {
  IdealFunctionality f;
  f.name = "xor-coin";
  f.a_qubits = f.b_qubits = f.ancilla_qubits = 1;
  f.out_a_qubits = f.out_b_qubits = 1;
  const Matrix cx_ab = kron(gates::CNOT(), gates::I());
  const Matrix cx_bc = kron(gates::I(), gates::CNOT());
  // Reorder (A, B, anc) -> (anc, B, A) so outputs come first.
  const Matrix to_front = kernel::swap_wires(3, {0}, {2});
  f.unitary = to_front * cx_bc * cx_ab;
  return f;
}

enum class Party { None, A, B };

/// Trusted third party running one functionality call. With a corrupted
/// party, the simulator supplies the extracted input, may reprogram the
/// corrupted output, and decides whether the honest party gets its output.
struct IdealSession {
  IdealFunctionality functionality;
  Party corrupted = Party::None;
  std::function<Matrix(const Matrix& corrupted_output)> program;         // optional
  std::function<double(const Matrix& corrupted_output)> abort_probability;  // optional

  bool consumed = false;

  explicit IdealSession(IdealFunctionality f, Party c = Party::None) : functionality(std::move(f)), corrupted(c) {
    functionality.validate();
  }
};

/// Outputs of one session; an empty optional is the abort symbol.
struct IdealOutput {
  bool abort = false;
  std::optional<MixedState> out_a, out_b;
  std::optional<MixedState> joint;  // (A~, B~) when no output was replaced or withheld
};

/// Runs the session once: F on the (extracted) inputs; with a corrupted
/// party, its output is delivered (optionally reprogrammed), then the abort
/// bit decides whether the honest party receives its output.
inline IdealOutput ideal_compute(IdealSession& s, const MixedState& in_a, const MixedState& in_b, Rng& rng) {
  const auto& f = s.functionality;
  if (s.consumed) throw PreconditionError(f.name + ": honest input already consumed");
  if (in_a.layout().total_qubits() != f.a_qubits || in_b.layout().total_qubits() != f.b_qubits)
    throw DimensionError(f.name + ": inputs do not match the signature");
  s.consumed = true;
  const Matrix joint = f.apply(kron(in_a.matrix(), in_b.matrix()));
  const int na = f.out_a_qubits, nb = f.out_b_qubits;
  std::vector<int> qa, qb;
  for (int q = 0; q < na; ++q) qa.push_back(q);
  for (int q = na; q < na + nb; ++q) qb.push_back(q);
  auto marginal = [&](const std::vector<int>& q, const char* reg, int size) {
    return MixedState::normalized(kernel::reduce(joint, na + nb, q), RegisterLayout{{reg, size}});
  };
  IdealOutput out;
  if (s.corrupted == Party::None) {
    out.joint = MixedState(joint, f.output_layout());
    out.out_a = marginal(qa, "A~", na);
    out.out_b = marginal(qb, "B~", nb);
    return out;
  }
  const bool a_bad = s.corrupted == Party::A;
  MixedState bad = a_bad ? marginal(qa, "A~", na) : marginal(qb, "B~", nb);
  MixedState good = a_bad ? marginal(qb, "B~", nb) : marginal(qa, "A~", na);
  bool replaced = false;
  if (s.program) {
    bad = MixedState(s.program(bad.matrix()), bad.layout());
    replaced = true;
  }
  out.abort = s.abort_probability ? rng.bernoulli(s.abort_probability(bad.matrix())) : false;
  (a_bad ? out.out_a : out.out_b) = bad;
  if (!out.abort) {
    (a_bad ? out.out_b : out.out_a) = good;
    if (!replaced) out.joint = MixedState(joint, f.output_layout());
  }
  return out;
}

/// Classical bit as a 1-qubit state.
inline MixedState bit_state(int b, const char* reg = "b") { return MixedState(PureState::basis(RegisterLayout{{reg, 1}}, b ? 1 : 0)); }

/// Reads a classical bit off a diagonal 1-qubit output (sampling if mixed).
inline int read_bit(const MixedState& s, Rng& rng) { return rng.bernoulli(s.matrix()(1, 1).real()) ? 1 : 0; }

}  // namespace qzk
