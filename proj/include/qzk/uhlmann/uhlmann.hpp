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
#include <vector>

#include "qzk/core.hpp"
#include "qzk/crypto/ideal.hpp"
#include "qzk/harness/record.hpp"

namespace qzk {

/// Unitaries C, D on R (x) S with |C> = C|0>, |D> = D|0> and equal
/// reduced states on R. gamma test-plus-target rounds, gamma = 8 delta^2
/// unless overridden.
struct UhlmannInstance {
  std::string name = "uhlmann";
  int r_qubits = 1, s_qubits = 1;
  Matrix c, d;
  double delta = 2.0;
  int gamma = 32;

  int n() const { return r_qubits + s_qubits; }
  Vector c_state() const { return c.col(0); }
  Vector d_state() const { return d.col(0); }
  std::vector<int> r_wires() const { return span_of(0, r_qubits); }
  std::vector<int> s_wires() const { return span_of(r_qubits, s_qubits); }
  RegisterLayout layout() const { return RegisterLayout{{"R", r_qubits}, {"S", s_qubits}}; }

  void validate(bool enforce_gamma = true) const {
    check_cap(n(), name);
    const auto dim = pow2(n());
    if (static_cast<std::size_t>(c.rows()) != dim || static_cast<std::size_t>(d.rows()) != dim)
      throw DimensionError(name + ": C and D must act on R S");
    if (!is_unitary(c) || !is_unitary(d)) throw PreconditionError(name + ": C and D must be unitary");
    if (delta <= 0) throw PreconditionError(name + ": delta must be positive");
    if (gamma < 1) throw PreconditionError(name + ": gamma must be positive");
    if (enforce_gamma && std::abs(gamma - 8 * delta * delta) > 1e-9)
      throw PreconditionError(name + ": gamma must equal 8 delta^2");
    const Matrix rc = kernel::reduce(c_state(), n(), r_wires()), rd = kernel::reduce(d_state(), n(), r_wires());
    if (max_abs(rc - rd) > 1e-9) throw PreconditionError(name + ": reduced states on R differ");
    if (min_eigenvalue(rc) <= 1e-9) throw PreconditionError(name + ": reduced state on R is not invertible");
  }

 private:
  static std::vector<int> span_of(int start, int count) {
    std::vector<int> v;
    for (int i = 0; i < count; ++i) v.push_back(start + i);
    return v;
  }
};

struct UhlmannUnitary {
  Matrix u;           // on S
  Matrix completion;  // columns: orthonormal basis of the complement used (input side)
  double residual = 0;
};

namespace detail {

/// Psi(r, s) = <r s|v>.
inline Matrix coefficient_matrix(const Vector& v, int r_qubits, int s_qubits) {
  const auto dr = static_cast<Eigen::Index>(pow2(r_qubits)), ds = static_cast<Eigen::Index>(pow2(s_qubits));
  Matrix psi(dr, ds);
  for (Eigen::Index r = 0; r < dr; ++r)
    for (Eigen::Index s = 0; s < ds; ++s) psi(r, s) = v[r * ds + s];
  return psi;
}

inline Vector apply_on_s(const UhlmannInstance& inst, const Matrix& u, const Vector& v) {
  Vector out = v;
  kernel::apply(out, inst.n(), inst.s_wires(), u);
  return out;
}

}  // namespace detail

/// U on S with (Id (x) U)|C> = |D>. With rho_R = Psi Psi^dagger and
/// X = rho_R^{-1/2} Psi (orthonormal rows), U^T = X_C^dagger X_D plus a
/// unitary map from the kernel of X_D to the kernel of X_C.
inline UhlmannUnitary compute_uhlmann(const UhlmannInstance& inst) {
  inst.validate(false);
  const Matrix pc = detail::coefficient_matrix(inst.c_state(), inst.r_qubits, inst.s_qubits);
  const Matrix pd = detail::coefficient_matrix(inst.d_state(), inst.r_qubits, inst.s_qubits);
  const Matrix rho = pc * pc.adjoint();
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (rho + rho.adjoint()));
  const Matrix inv_sqrt = es.eigenvectors() * es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() * es.eigenvectors().adjoint();
  const Matrix xc = inv_sqrt * pc, xd = inv_sqrt * pd;
  UhlmannUnitary out;
  const Matrix qc = orthonormal_complement(xc.adjoint()), qd = orthonormal_complement(xd.adjoint());
  out.completion = qc;
  // xc V = xd with V unitary: the kernels of xc and xd are matched by qc qd^dagger.
  const Matrix v = xc.adjoint() * xd + qc * qd.adjoint();
  out.u = v.transpose();
  out.residual = (detail::apply_on_s(inst, out.u, inst.c_state()) - inst.d_state()).norm();
  if (out.residual > 1e-9 || !is_unitary(out.u, 1e-9))
    throw PreconditionError(inst.name + ": Uhlmann construction failed (residual " + std::to_string(out.residual) + ")");
  return out;
}

/// Instance with |D> = (Id (x) V)|C> for Haar C and V.
inline UhlmannInstance random_uhlmann_instance(Rng& rng, int r_qubits = 2, int s_qubits = 2, double delta = 2.0) {
  UhlmannInstance inst;
  inst.name = "random-uhlmann";
  inst.r_qubits = r_qubits;
  inst.s_qubits = s_qubits;
  inst.delta = delta;
  inst.gamma = static_cast<int>(std::lround(8 * delta * delta));
  inst.c = random_unitary(pow2(r_qubits + s_qubits), rng);
  inst.d = kernel::embed(random_unitary(pow2(s_qubits), rng), inst.n(), inst.s_wires()) * inst.c;
  inst.validate();
  return inst;
}

/// Prover: a unitary on the received S-sized register for each round
/// (1-based).
struct UhlmannProver {
  std::string label;
  std::function<Matrix(int round)> op;
};

inline UhlmannProver honest_uhlmann_prover(const UhlmannUnitary& u) {
  return {"honest", [m = u.u](int) { return m; }};
}

/// U followed by exp(-i eps Y) on the first S qubit.
inline UhlmannProver perturbed_uhlmann_prover(const UhlmannInstance& inst, const UhlmannUnitary& u, double eps) {
  const Matrix rot = kernel::embed(gates::Ry(2 * eps), inst.s_qubits, {0});
  return {"perturbed", [m = Matrix(rot * u.u)](int) { return m; }};
}

inline UhlmannProver identity_uhlmann_prover(const UhlmannInstance& inst) {
  return {"identity", [d = pow2(inst.s_qubits)](int) { return Matrix(Matrix::Identity(d, d)); }};
}

/// U in every round except `bad`, where it applies `garbage`.
inline UhlmannProver switching_uhlmann_prover(const UhlmannUnitary& u, int bad, const Matrix& garbage) {
  return {"switch@" + std::to_string(bad), [m = u.u, g = garbage, bad](int i) { return i == bad ? g : m; }};
}

struct UhlmannRun {
  bool accepted = false;
  int i_star = 0;
  std::optional<MixedState> output;  // (Ref, T) when accepted
};

/// Probability that round i's test passes: |<D| (Id (x) P_i) |C>|^2.
inline double uhlmann_test_pass(const UhlmannInstance& inst, const UhlmannProver& p, int i) {
  return std::norm(inst.d_state().dot(detail::apply_on_s(inst, p.op(i), inst.c_state())));
}

/// (Id (x) P) rho (Id (x) P)^dagger on (Ref, T).
inline MixedState uhlmann_output(const UhlmannInstance& inst, const Matrix& p, const MixedState& target) {
  Matrix m = target.matrix();
  kernel::conjugate(m, inst.n(), inst.s_wires(), p);
  return MixedState(0.5 * (m + m.adjoint()), target.layout());
}

inline void check_target(const UhlmannInstance& inst, const MixedState& target) {
  if (target.layout().total_qubits() != inst.n())
    throw DimensionError(inst.name + ": target must live on (Ref, T) with T the size of S");
}

/// One run: i* uniform in 1..gamma. Test rounds send the S half of a fresh
/// |C>, get it back and measure {|D><D|, Id - |D><D|}, aborting on failure;
/// round i* sends T. Returns T (with the reference) if no test failed.
inline UhlmannRun run_uhlmann_protocol(const UhlmannInstance& inst, const UhlmannProver& p, const MixedState& target, Rng& rng) {
  check_target(inst, target);
  UhlmannRun out;
  out.i_star = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(inst.gamma)));
  for (int i = 1; i <= inst.gamma; ++i) {
    if (i == out.i_star) continue;
    if (!rng.bernoulli(uhlmann_test_pass(inst, p, i))) return out;
  }
  out.accepted = true;
  out.output = uhlmann_output(inst, p.op(out.i_star), target);
  return out;
}

struct UhlmannExact {
  double accept = 0;
  std::optional<MixedState> conditioned;  // average output given acceptance
};

/// Exact acceptance and acceptance-conditioned average output.
inline UhlmannExact uhlmann_exact(const UhlmannInstance& inst, const UhlmannProver& p, const MixedState& target) {
  check_target(inst, target);
  std::vector<double> pass(inst.gamma + 1);
  for (int i = 1; i <= inst.gamma; ++i) pass[i] = uhlmann_test_pass(inst, p, i);
  UhlmannExact out;
  Matrix acc = Matrix::Zero(target.dim(), target.dim());
  for (int s = 1; s <= inst.gamma; ++s) {
    double w = 1.0 / inst.gamma;
    for (int i = 1; i <= inst.gamma; ++i)
      if (i != s) w *= pass[i];
    out.accept += w;
    if (w > 0) acc += w * uhlmann_output(inst, p.op(s), target).matrix();
  }
  if (out.accept > kZeroProb) out.conditioned = MixedState::normalized(acc, target.layout());
  return out;
}

/// Acceptance rate and, when it is at least 1/2, the trace distance of the
/// average accepted output from (Id (x) U)|C><C|(Id (x) U)^dagger against
/// 1/delta. The verifier's T is the S half of |C>.
inline ExperimentRecord soundness_check(const UhlmannInstance& inst, const UhlmannProver& p, std::int64_t trials, Rng& rng) {
  inst.validate(false);
  if (trials < 1) throw PreconditionError("soundness_check: need at least one trial");
  const auto u = compute_uhlmann(inst);
  const MixedState target(PureState(inst.c_state(), inst.layout()));
  const MixedState ideal(PureState(detail::apply_on_s(inst, u.u, inst.c_state()), inst.layout()));
  ExperimentRecord rec;
  rec.experiment = "uhlmann";
  rec.config = {{"instance", inst.name}, {"prover", p.label}, {"delta", inst.delta}, {"gamma", inst.gamma}, {"trials", trials}};
  std::int64_t acc = 0;
  Matrix sum = Matrix::Zero(target.dim(), target.dim());
  for (std::int64_t t = 0; t < trials; ++t) {
    const auto run = run_uhlmann_protocol(inst, p, target, rng);
    if (!run.accepted) continue;
    ++acc;
    sum += run.output->matrix();
  }
  const auto exact = uhlmann_exact(inst, p, target);
  const double rate = static_cast<double>(acc) / static_cast<double>(trials);
  rec.add(equality_row("acceptance[" + p.label + "]", rate, exact.accept, binomial_sigma(exact.accept, static_cast<std::size_t>(trials)),
                       "oracle:uhlmann-exact"));
  const double bound = 1.0 / inst.delta;
  if (rate >= 0.5 && acc > 0) {
    const double td = trace_distance(Matrix(sum / static_cast<double>(acc)), ideal.matrix());
    // Sampling noise of the averaged output: one trace-norm unit per sqrt(accepted).
    const double slack = 1.0 / std::sqrt(static_cast<double>(acc));
    rec.add(upper_bound_row("output-distance[" + p.label + "]", td, bound, slack / 3, "bound:uhlmann-soundness"));
  } else {
    rec.add({"output-distance[" + p.label + "]", 0.0, bound, 0.0, Verdict::NotApplicable, "bound:uhlmann-soundness"});
  }
  if (exact.accept >= 0.5) {
    rec.add(upper_bound_row("output-distance-exact[" + p.label + "]", trace_distance(*exact.conditioned, ideal), bound, 0.0,
                            "bound:uhlmann-soundness"));
  } else {
    rec.add({"output-distance-exact[" + p.label + "]", 0.0, bound, 0.0, Verdict::NotApplicable, "bound:uhlmann-soundness"});
  }
  return rec;
}

/// Black-box access to U with a call budget; exceeding it is a hard error.
class UhlmannOracle {
 public:
  UhlmannOracle(Matrix u, int budget = 1) : u_(std::move(u)), budget_(budget) {}

  MixedState apply(const UhlmannInstance& inst, const MixedState& target) {
    if (calls_ >= budget_) throw PreconditionError("UhlmannOracle: query budget of " + std::to_string(budget_) + " exhausted");
    ++calls_;
    return uhlmann_output(inst, u_, target);
  }
  int calls() const { return calls_; }

 private:
  Matrix u_;
  int budget_;
  int calls_ = 0;
};

/// Corrupted verifier: its (Ref, T) input; it may place T at any round.
struct UhlmannVerifier {
  std::string label = "honest";
  MixedState target;
  int i_star = 1;
};

/// What the verifier sees: the returned test registers (with their R
/// halves) and the returned T (with its reference).
struct UhlmannView {
  std::vector<MixedState> tests;
  MixedState output;
};

namespace detail {

/// Ideal-functionality extraction of the verifier's (Ref, T) input.
inline MixedState extract_target(const UhlmannInstance& inst, const UhlmannVerifier& v, Rng& rng) {
  IdealSession session(identity_functionality(inst.n(), 1), Party::A);
  const auto out = ideal_compute(session, v.target, bit_state(0), rng);
  return MixedState(out.out_a->matrix(), v.target.layout());
}

}  // namespace detail

/// Real ideal-world interaction with the honest prover (U every round).
inline UhlmannView real_uhlmann_view(const UhlmannInstance& inst, const UhlmannUnitary& u, const UhlmannVerifier& v) {
  check_target(inst, v.target);
  UhlmannView out{{}, uhlmann_output(inst, u.u, v.target)};
  const MixedState c(PureState(inst.c_state(), inst.layout()));
  for (int i = 1; i <= inst.gamma; ++i)
    if (i != v.i_star) out.tests.push_back(uhlmann_output(inst, u.u, c));
  return out;
}

struct UhlmannSimulation {
  UhlmannView view;
  int oracle_calls = 0;
};

/// Simulator: extracts T through the ideal session, answers every test
/// round with |D> = D|0> (public), and spends its single oracle query on T.
inline UhlmannSimulation zk_simulate_uhlmann(const UhlmannInstance& inst, UhlmannOracle& oracle, const UhlmannVerifier& v, Rng& rng) {
  check_target(inst, v.target);
  if (v.i_star < 1 || v.i_star > inst.gamma) throw PreconditionError("zk_simulate_uhlmann: target round out of range");
  const MixedState t = detail::extract_target(inst, v, rng);
  const MixedState dd(PureState(inst.d_state(), inst.layout()));
  UhlmannSimulation out{{std::vector<MixedState>(static_cast<std::size_t>(inst.gamma - 1), dd), oracle.apply(inst, t)}, 0};
  out.oracle_calls = oracle.calls();
  return out;
}

inline double view_distance(const UhlmannView& a, const UhlmannView& b) {
  if (a.tests.size() != b.tests.size()) throw DimensionError("view_distance: different round counts");
  double d = trace_distance(a.output, b.output);
  for (std::size_t i = 0; i < a.tests.size(); ++i) d = std::max(d, trace_distance(a.tests[i], b.tests[i]));
  return d;
}

}  // namespace qzk
