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
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "qzk/core.hpp"
#include "qzk/harness/record.hpp"

namespace qzk {

enum class PqmaMode { Product, Entangled };

/// p prover copies, q verifier copies, n instance qubits.
struct PqmaParams {
  std::int64_t p = 2, q = 1;
  int n = 1;
  PqmaMode mode = PqmaMode::Product;

  void validate() const {
    if (q < 1 || p <= q) throw PreconditionError("PqmaParams: need 0 < q < p");
    if (n < 1) throw PreconditionError("PqmaParams: need n >= 1");
  }
};

/// Instance |psi> with witness sigma and verifier unitary V on (witness, instance).
/// Acceptance is the first output qubit of V reading 1.
struct PqmaInstance {
  std::string name;
  PureState psi;
  MixedState witness;
  Matrix v;
  bool yes = true;
  double completeness_error = 0.0;

  int n() const { return psi.layout().total_qubits(); }
  int w() const { return witness.layout().total_qubits(); }

  /// V^dag (|1><1| (x) Id) V on (witness, instance).
  Matrix accept_projector() const {
    const int k = w() + n();
    Matrix one = Matrix::Zero(2, 2);
    one(1, 1) = 1;
    return v.adjoint() * kron(one, gates::I(k - 1)) * v;
  }

  /// Final-test acceptance of one (witness, instance) copy.
  double final_accept(const Matrix& pair) const { return (accept_projector() * pair).trace().real(); }

  double honest_acceptance() const { return final_accept(kron(witness.matrix(), psi.density())); }

  /// Largest final-test acceptance over witnesses for instance copy rho_x,
  /// with the maximizing witness.
  std::pair<double, Vector> best_witness(const Matrix& rho_x) const {
    const int k = w() + n();
    std::vector<int> wq(w());
    for (int i = 0; i < w(); ++i) wq[i] = i;
    const Matrix m = kernel::reduce(Matrix(accept_projector() * kron(gates::I(w()), rho_x)), k, wq);
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.adjoint()));
    const auto top = es.eigenvalues().size() - 1;
    return {es.eigenvalues()(top), es.eigenvectors().col(top)};
  }

  void validate() const {
    const int k = w() + n();
    if (k < 1) throw DimensionError(name + ": empty verifier registers");
    if (static_cast<std::size_t>(v.rows()) != pow2(k) || !is_unitary(v))
      throw DimensionError(name + ": V is not a unitary on (witness, instance)");
    if (yes && honest_acceptance() < 1.0 - completeness_error - kTol)
      throw PreconditionError(name + ": honest acceptance below the declared completeness");
  }
};

/// One (witness, instance) copy state with its multiplicity.
struct CopyClass {
  std::int64_t count = 0;
  Matrix pair;
};

/// Product mode: copies grouped by identical pair state. Entangled mode: one
/// joint state on (w_1, x_1, ..., w_p, x_p).
struct PqmaProverInput {
  std::vector<CopyClass> classes;
  std::optional<Matrix> joint;

  static PqmaProverInput product(std::vector<CopyClass> c) { return {std::move(c), std::nullopt}; }
  static PqmaProverInput entangled(Matrix j) { return {{}, std::move(j)}; }

  /// sigma (x) psi in every slot.
  static PqmaProverInput honest(const PqmaParams& prm, const PqmaInstance& inst) {
    const Matrix pair = kron(inst.witness.matrix(), inst.psi.density());
    if (prm.mode == PqmaMode::Product) return product({{prm.p, pair}});
    check_cap(static_cast<int>(prm.p) * (inst.w() + inst.n()) + static_cast<int>(prm.q) * inst.n(), "PqmaProverInput::honest");
    Matrix j = Matrix::Ones(1, 1);
    for (std::int64_t i = 0; i < prm.p; ++i) j = kron(j, pair);
    return entangled(std::move(j));
  }

  void validate(const PqmaParams& prm, const PqmaInstance& inst) const {
    const std::size_t d = pow2(inst.w() + inst.n());
    if (prm.mode == PqmaMode::Product) {
      if (joint || classes.empty()) throw DimensionError("PqmaProverInput: product mode needs copy classes");
      std::int64_t total = 0;
      for (const auto& c : classes) {
        if (c.count < 0) throw PreconditionError("PqmaProverInput: negative copy count");
        if (static_cast<std::size_t>(c.pair.rows()) != d) throw DimensionError("PqmaProverInput: copy is not on (witness, instance)");
        if (!is_psd(c.pair) || std::abs(c.pair.trace().real() - 1) > kTol) throw PreconditionError("PqmaProverInput: copy is not a density");
        total += c.count;
      }
      if (total != prm.p) throw DimensionError("PqmaProverInput: copy counts do not sum to p");
    } else {
      if (!joint) throw DimensionError("PqmaProverInput: entangled mode needs a joint state");
      const int qubits = static_cast<int>(prm.p) * (inst.w() + inst.n());
      check_cap(qubits + static_cast<int>(prm.q) * inst.n(), "PqmaProverInput");
      if (static_cast<std::size_t>(joint->rows()) != pow2(qubits)) throw DimensionError("PqmaProverInput: joint state has the wrong size");
      if (!is_psd(*joint) || std::abs(joint->trace().real() - 1) > kTol) throw PreconditionError("PqmaProverInput: joint state is not a density");
    }
  }
};

enum class PqmaOutcome { Accept, Reject, Abort };

inline const char* to_string(PqmaOutcome o) {
  switch (o) {
    case PqmaOutcome::Accept: return "accept";
    case PqmaOutcome::Reject: return "reject";
    case PqmaOutcome::Abort: return "abort";
  }
  return "?";
}

struct PqmaProbabilities {
  double accept = 0, reject = 0, abort = 0;
};

/// sqrt(2 q^2 n / (p - q)) + 0.99^q + 1/sqrt(50); may exceed 1.
inline double soundness_bound(double p, double q, double n) {
  if (q < 1 || p <= q) throw PreconditionError("soundness_bound: need p > q >= 1");
  if (n < 1) throw PreconditionError("soundness_bound: need n >= 1");
  return std::sqrt(2 * q * q * n / (p - q)) + std::pow(0.99, q) + 1 / std::sqrt(50.0);
}

namespace detail {

inline void check_inputs(const PqmaParams& prm, const PqmaInstance& inst, const PqmaProverInput& in, const MixedState& vcopy) {
  prm.validate();
  if (inst.n() != prm.n) throw DimensionError("pqma: instance size differs from n");
  if (vcopy.layout().total_qubits() != prm.n) throw DimensionError("pqma: verifier copy size differs from n");
  in.validate(prm, inst);
}

/// SWAP-test acceptance of a prover instance copy against a verifier copy.
inline double swap_pass(const Matrix& rho_x, const Matrix& tau) {
  const int k = log2_exact(static_cast<std::size_t>(tau.rows()));
  return (swap_test_accept_projector(k) * kron(rho_x, tau)).trace().real();
}

inline Matrix instance_marginal(const PqmaInstance& inst, const Matrix& pair) {
  std::vector<int> xq;
  for (int i = inst.w(); i < inst.w() + inst.n(); ++i) xq.push_back(i);
  return kernel::reduce(pair, inst.w() + inst.n(), xq);
}

inline double log_choose(double n, double k) { return std::lgamma(n + 1) - std::lgamma(k + 1) - std::lgamma(n - k + 1); }

/// Probability that q copies drawn uniformly without replacement from the
/// classes all pass, class c passing with probability a[c]. Log-space sum
/// over class compositions.
inline double all_pass_probability(const std::vector<std::int64_t>& counts, const std::vector<double>& a, std::int64_t q) {
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  std::int64_t total = 0;
  for (auto c : counts) total += c;
  if (q > total) throw PreconditionError("all_pass_probability: fewer copies than draws");
  std::vector<double> dp(static_cast<std::size_t>(q + 1), kNegInf);
  dp[0] = 0.0;
  for (std::size_t c = 0; c < counts.size(); ++c) {
    const std::int64_t kmax = std::min(counts[c], q);
    const double la = a[c] > 0 ? std::log(a[c]) : kNegInf;
    std::vector<double> next(dp.size(), kNegInf);
    for (std::int64_t j = 0; j <= q; ++j) {
      double m = kNegInf;
      std::vector<double> terms;
      for (std::int64_t k = 0; k <= std::min(j, kmax); ++k) {
        if (dp[j - k] == kNegInf || (k > 0 && la == kNegInf)) continue;
        const double t = dp[j - k] + log_choose(static_cast<double>(counts[c]), static_cast<double>(k)) + (k > 0 ? k * la : 0.0);
        terms.push_back(t);
        m = std::max(m, t);
      }
      if (terms.empty()) continue;
      double s = 0;
      for (double t : terms) s += std::exp(t - m);
      next[j] = m + std::log(s);
    }
    dp = std::move(next);
  }
  if (dp[q] == kNegInf) return 0.0;
  return std::min(1.0, std::exp(dp[q] - log_choose(static_cast<double>(total), static_cast<double>(q))));
}

/// Joint-mode wires of copy s: witness then instance.
inline std::vector<int> pair_wires(const PqmaInstance& inst, std::int64_t s) {
  const int k = inst.w() + inst.n();
  std::vector<int> q(k);
  for (int i = 0; i < k; ++i) q[i] = static_cast<int>(s) * k + i;
  return q;
}

inline std::vector<int> swap_wires_for(const PqmaParams& prm, const PqmaInstance& inst, std::int64_t s, std::int64_t j) {
  const int k = inst.w() + inst.n();
  std::vector<int> q;
  for (int i = 0; i < inst.n(); ++i) q.push_back(static_cast<int>(s) * k + inst.w() + i);
  for (int i = 0; i < inst.n(); ++i) q.push_back(static_cast<int>(prm.p) * k + static_cast<int>(j) * inst.n() + i);
  return q;
}

/// Prover joint state with q verifier copies appended.
inline Matrix with_verifier_copies(const PqmaParams& prm, const Matrix& joint, const Matrix& tau) {
  Matrix x = joint;
  for (std::int64_t j = 0; j < prm.q; ++j) x = kron(x, tau);
  return x;
}

inline int joint_qubits(const PqmaParams& prm, const PqmaInstance& inst) {
  return static_cast<int>(prm.p) * (inst.w() + inst.n()) + static_cast<int>(prm.q) * inst.n();
}

}  // namespace detail

/// Exact outcome distribution of one protocol execution.
inline PqmaProbabilities pqma_exact(const PqmaParams& prm, const PqmaInstance& inst, const PqmaProverInput& in, const MixedState& vcopy) {
  detail::check_inputs(prm, inst, in, vcopy);
  const Matrix& tau = vcopy.matrix();
  PqmaProbabilities out;
  if (prm.mode == PqmaMode::Product) {
    // s* first (uniform), then S uniform among the remaining p - 1 copies.
    std::vector<std::int64_t> counts;
    std::vector<double> a, f;
    for (const auto& c : in.classes) {
      counts.push_back(c.count);
      a.push_back(detail::swap_pass(detail::instance_marginal(inst, c.pair), tau));
      f.push_back(inst.final_accept(c.pair));
    }
    double pass = 0, acc = 0;
    for (std::size_t c = 0; c < counts.size(); ++c) {
      if (counts[c] == 0) continue;
      auto rest = counts;
      --rest[c];
      const double g = detail::all_pass_probability(rest, a, prm.q) * static_cast<double>(counts[c]) / static_cast<double>(prm.p);
      pass += g;
      acc += g * f[c];
    }
    out.accept = acc;
    out.reject = pass - acc;
    out.abort = 1 - pass;
    return out;
  }
  const int n = detail::joint_qubits(prm, inst);
  const Matrix full = detail::with_verifier_copies(prm, *in.joint, tau);
  const Matrix pass_op = swap_test_accept_projector(prm.n);
  const Matrix fin = inst.accept_projector();
  const auto p = static_cast<int>(prm.p);
  double pass = 0, acc = 0, choices = 0;
  for (std::uint32_t mask = 0; mask < (1u << p); ++mask) {
    if (std::popcount(mask) != prm.q) continue;
    Matrix x = full;
    std::int64_t j = 0;
    for (int s = 0; s < p; ++s)
      if (mask >> s & 1u) kernel::apply_left(x, n, detail::swap_wires_for(prm, inst, s, j++), pass_op);
    for (int star = 0; star < p; ++star) {
      if (mask >> star & 1u) continue;
      Matrix y = x;
      kernel::apply_left(y, n, detail::pair_wires(inst, star), fin);
      pass += x.trace().real();
      acc += y.trace().real();
      choices += 1;
    }
  }
  out.accept = acc / choices;
  out.reject = (pass - acc) / choices;
  out.abort = 1 - pass / choices;
  return out;
}

/// One sampled execution of the ideal functionality.
inline PqmaOutcome run_pqma(const PqmaParams& prm, const PqmaInstance& inst, const PqmaProverInput& in, const MixedState& vcopy, Rng& rng) {
  detail::check_inputs(prm, inst, in, vcopy);
  const Matrix& tau = vcopy.matrix();
  if (prm.mode == PqmaMode::Product) {
    std::vector<std::int64_t> left;
    std::vector<double> a;
    for (const auto& c : in.classes) {
      left.push_back(c.count);
      a.push_back(detail::swap_pass(detail::instance_marginal(inst, c.pair), tau));
    }
    auto draw = [&](std::int64_t remaining) {
      auto u = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(remaining)));
      std::size_t c = 0;
      while (u >= left[c]) u -= left[c++];
      --left[c];
      return c;
    };
    std::int64_t remaining = prm.p;
    std::vector<std::size_t> s_classes;
    for (std::int64_t i = 0; i < prm.q; ++i) s_classes.push_back(draw(remaining--));
    const std::size_t star = draw(remaining);
    for (auto c : s_classes)
      if (!rng.bernoulli(a[c])) return PqmaOutcome::Abort;
    return rng.bernoulli(inst.final_accept(in.classes[star].pair)) ? PqmaOutcome::Accept : PqmaOutcome::Reject;
  }
  const int n = detail::joint_qubits(prm, inst);
  Matrix x = detail::with_verifier_copies(prm, *in.joint, tau);
  std::vector<std::int64_t> idx(static_cast<std::size_t>(prm.p));
  for (std::int64_t i = 0; i < prm.p; ++i) idx[i] = i;
  for (std::int64_t i = 0; i <= prm.q; ++i) std::swap(idx[i], idx[i + static_cast<std::int64_t>(rng.below(prm.p - i))]);
  const Matrix pass_op = swap_test_accept_projector(prm.n);
  auto project = [&](const std::vector<int>& qs, const Matrix& pr) {
    Matrix y = x;
    kernel::conjugate(y, n, qs, pr);
    const double pa = y.trace().real();
    if (!rng.bernoulli(pa)) return false;
    x = y / pa;
    return true;
  };
  for (std::int64_t j = 0; j < prm.q; ++j)
    if (!project(detail::swap_wires_for(prm, inst, idx[j], j), pass_op)) return PqmaOutcome::Abort;
  return project(detail::pair_wires(inst, idx[prm.q]), inst.accept_projector()) ? PqmaOutcome::Accept : PqmaOutcome::Reject;
}

/// k independent executions; accepts iff all accept.
inline double pqma_repeated_acceptance(const PqmaParams& prm, const PqmaInstance& inst, const PqmaProverInput& in, const MixedState& vcopy,
                                       int k) {
  if (k < 1) throw PreconditionError("pqma_repeated_acceptance: need k >= 1");
  return std::pow(pqma_exact(prm, inst, in, vcopy).accept, k);
}

inline bool run_pqma_repeated(const PqmaParams& prm, const PqmaInstance& inst, const PqmaProverInput& in, const MixedState& vcopy, int k,
                              Rng& rng) {
  if (k < 1) throw PreconditionError("run_pqma_repeated: need k >= 1");
  for (int i = 0; i < k; ++i)
    if (run_pqma(prm, inst, in, vcopy, rng) != PqmaOutcome::Accept) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Zero knowledge.

/// Corrupted verifier input: q instance registers then a private register P.
struct PqmaVerifierInput {
  Matrix joint;
  int private_qubits = 0;
};

/// Verifier view: |0><0| (x) rho_0 + |1><1| (x) rho_1 on (output bit, P).
struct PqmaView {
  Matrix cq;
  double accept() const {
    const auto h = cq.rows() / 2;
    return cq.bottomRightCorner(h, h).trace().real();
  }
};

/// The fresh |psi> copies held by the simulator.
struct SimulatorCopies {
  PureState psi;
  std::int64_t budget = 0;
};

inline SimulatorCopies simulator_copies(const PqmaInstance& inst, std::int64_t s) { return {inst.psi, s}; }

namespace detail {

/// Unnormalized P-state after q SWAP tests of the verifier registers against
/// reference copies of `ref`, all passing.
inline Matrix all_pass_private(const PqmaParams& prm, const PqmaVerifierInput& vin, const PureState& ref) {
  const int nq = static_cast<int>(prm.q) * prm.n;
  const int n = nq + vin.private_qubits + nq;
  check_cap(n, "pqma view");
  if (static_cast<std::size_t>(vin.joint.rows()) != pow2(nq + vin.private_qubits))
    throw DimensionError("pqma view: verifier input is not on (q copies, P)");
  Matrix x = vin.joint;
  for (std::int64_t j = 0; j < prm.q; ++j) x = kron(x, ref.density());
  const Matrix pass_op = swap_test_accept_projector(prm.n);
  for (std::int64_t j = 0; j < prm.q; ++j) {
    std::vector<int> qs;
    for (int i = 0; i < prm.n; ++i) qs.push_back(static_cast<int>(j) * prm.n + i);
    for (int i = 0; i < prm.n; ++i) qs.push_back(nq + vin.private_qubits + static_cast<int>(j) * prm.n + i);
    kernel::conjugate(x, n, qs, pass_op);
  }
  std::vector<int> keep;
  for (int i = nq; i < nq + vin.private_qubits; ++i) keep.push_back(i);
  return kernel::reduce(x, n, keep);
}

inline PqmaView make_view(const Matrix& total_p, const Matrix& ones) {
  Matrix z0 = Matrix::Zero(2, 2), z1 = z0;
  z0(0, 0) = 1;
  z1(1, 1) = 1;
  Matrix v = kron(z0, total_p - ones) + kron(z1, ones);
  return {0.5 * (v + v.adjoint())};
}

inline Matrix private_marginal(const PqmaParams& prm, const PqmaVerifierInput& vin) {
  const int nq = static_cast<int>(prm.q) * prm.n;
  std::vector<int> keep;
  for (int i = nq; i < nq + vin.private_qubits; ++i) keep.push_back(i);
  return kernel::reduce(vin.joint, nq + vin.private_qubits, keep);
}

}  // namespace detail

/// Exact verifier view of the real ideal-world run with the honest prover:
/// SWAP tests against the prover's copies, then the final test on an honest
/// (witness, instance) pair.
inline PqmaView pqma_real_view(const PqmaParams& prm, const PqmaInstance& inst, const PqmaVerifierInput& vin) {
  prm.validate();
  const Matrix ones = detail::all_pass_private(prm, vin, inst.psi) * inst.honest_acceptance();
  return detail::make_view(detail::private_marginal(prm, vin), ones);
}

struct PqmaSimulation {
  PqmaView view;     // exact simulated view
  int output = 0;    // one sampled output bit
  Matrix residual;   // normalized P-state given the sampled output
};

/// Honest-verifier simulator: takes the verifier's input registers (as the
/// ideal functionality would), SWAP-tests them against its own copies of
/// |psi> and programs the output to 1 iff every test passed.
inline PqmaSimulation hv_simulate_pqma(const PqmaParams& prm, const SimulatorCopies& copies, const PqmaVerifierInput& vin, Rng& rng) {
  prm.validate();
  if (copies.budget < prm.q) throw PreconditionError("hv_simulate_pqma: copy budget exhausted");
  if (copies.psi.layout().total_qubits() != prm.n) throw DimensionError("hv_simulate_pqma: simulator copies have the wrong size");
  PqmaSimulation sim;
  const Matrix total = detail::private_marginal(prm, vin);
  const Matrix ones = detail::all_pass_private(prm, vin, copies.psi);
  sim.view = detail::make_view(total, ones);
  const double pa = ones.trace().real();
  sim.output = rng.bernoulli(pa) ? 1 : 0;
  const Matrix branch = sim.output ? ones : Matrix(total - ones);
  const double pb = branch.trace().real();
  sim.residual = pb > kZeroProb ? Matrix(branch / pb) : branch;
  return sim;
}

/// One sampled output bit of the real run seen by the verifier.
inline int sample_pqma_real_output(const PqmaParams& prm, const PqmaInstance& inst, const PqmaVerifierInput& vin, Rng& rng) {
  return rng.bernoulli(pqma_real_view(prm, inst, vin).accept()) ? 1 : 0;
}

/// q copies of rho (x) Id-free private register of size 0.
inline PqmaVerifierInput product_verifier_input(const PqmaParams& prm, const Matrix& rho) {
  Matrix x = Matrix::Ones(1, 1);
  for (std::int64_t j = 0; j < prm.q; ++j) x = kron(x, rho);
  return {x, 0};
}

// ---------------------------------------------------------------------------
// Cheating harness.

struct CheatStrategy {
  std::string label;
  PqmaProverInput input;
};

namespace detail {

/// Basis state of n qubits with the largest best-witness acceptance.
inline Vector planted_state(const PqmaInstance& inst) {
  const std::size_t d = pow2(inst.n());
  Vector best = basis_state(d, 0);
  double val = -1;
  for (std::size_t i = 0; i < d; ++i) {
    const Vector e = basis_state(d, i);
    const double v = inst.best_witness(e * e.adjoint()).first;
    if (v > val + 1e-12) val = v, best = e;
  }
  return best;
}

inline Matrix best_pair(const PqmaInstance& inst, const Vector& x) {
  const Matrix rx = x * x.adjoint();
  const Vector w = inst.best_witness(rx).second;
  return kron(Matrix(w * w.adjoint()), rx);
}

inline Vector orthogonal_to(const Vector& psi, const Vector& hint) {
  Vector v = hint - psi * psi.dot(hint);
  if (v.norm() < 1e-6) {
    for (Eigen::Index i = 0; i < psi.size(); ++i) {
      v = basis_state(psi.size(), i) - psi * psi(i);
      if (v.norm() > 1e-3) break;
    }
  }
  return v / v.norm();
}

}  // namespace detail

/// Product-mode cheating provers on a no instance. Families:
///   bad-witness        every copy |psi> with the best witness for |psi>
///   orthogonal-copies  every copy |psi_perp> with its best witness
///   planted-copies     k copies of a high-acceptance basis state, rest honest
///   rotated-copies     every copy cos t |psi> + sin t |psi_perp>
///   all                union of the above
inline std::vector<CheatStrategy> cheat_family(const PqmaParams& prm, const PqmaInstance& inst, const std::string& family) {
  const Vector psi = inst.psi.amplitudes();
  const Vector planted = detail::planted_state(inst);
  const Vector perp = detail::orthogonal_to(psi, planted);
  const bool all = family == "all";
  std::vector<CheatStrategy> out;
  if (all || family == "bad-witness") out.push_back({"bad-witness", PqmaProverInput::product({{prm.p, detail::best_pair(inst, psi)}})});
  if (all || family == "orthogonal-copies")
    out.push_back({"orthogonal-copies", PqmaProverInput::product({{prm.p, detail::best_pair(inst, perp)}})});
  if (all || family == "planted-copies") {
    for (double frac : {0.001, 0.01, 0.1, 0.5, 1.0}) {
      const auto k = std::clamp<std::int64_t>(static_cast<std::int64_t>(std::llround(frac * static_cast<double>(prm.p))), 1, prm.p);
      std::vector<CopyClass> cl{{k, detail::best_pair(inst, planted)}};
      if (k < prm.p) cl.push_back({prm.p - k, detail::best_pair(inst, psi)});
      out.push_back({"planted-copies:k=" + std::to_string(k), PqmaProverInput::product(std::move(cl))});
    }
  }
  if (all || family == "rotated-copies") {
    for (int i = 1; i <= 7; ++i) {
      const double t = i * std::acos(-1.0) / 16;
      const Vector x = std::cos(t) * psi + std::sin(t) * perp;
      out.push_back({"rotated-copies:t=" + std::to_string(i) + "pi/16", PqmaProverInput::product({{prm.p, detail::best_pair(inst, x)}})});
    }
  }
  if (out.empty()) throw ConfigError("cheat_harness: unknown strategy family '" + family + "'");
  return out;
}

/// Runs every strategy of the family `trials` times against the honest
/// verifier; one row per strategy plus the family maximum against the bound.
inline ExperimentRecord cheat_harness(const PqmaParams& prm, const PqmaInstance& inst, const std::string& family, std::size_t trials,
                                      Rng& rng) {
  const auto t0 = std::chrono::steady_clock::now();
  prm.validate();
  if (prm.mode != PqmaMode::Product) throw PreconditionError("cheat_harness: strategies are product-mode");
  ExperimentRecord rec;
  rec.experiment = "pqma";
  rec.config = {{"instance", inst.name}, {"p", prm.p}, {"q", prm.q}, {"n", prm.n}, {"family", family}, {"trials", trials}};
  const double bound = soundness_bound(static_cast<double>(prm.p), static_cast<double>(prm.q), prm.n);
  const MixedState vcopy(inst.psi);
  double best = -1, best_sigma = 0;
  std::uint64_t stream = 0;
  for (const auto& s : cheat_family(prm, inst, family)) {
    const double exact = pqma_exact(prm, inst, s.input, vcopy).accept;
    Rng r = rng.split(stream++);
    std::size_t acc = 0;
    for (std::size_t t = 0; t < trials; ++t) acc += run_pqma(prm, inst, s.input, vcopy, r) == PqmaOutcome::Accept;
    const double emp = trials ? static_cast<double>(acc) / static_cast<double>(trials) : exact;
    const double sig = binomial_sigma(exact, trials);
    rec.add(equality_row("acceptance[" + s.label + "]", emp, exact, sig, "oracle:pqma-exact", 1e-12));
    rec.add(upper_bound_row("soundness[" + s.label + "]", emp, bound, sig, "bound:pqma-soundness"));
    if (emp > best) best = emp, best_sigma = sig;
  }
  rec.add(upper_bound_row("max-acceptance", best, bound, best_sigma, "bound:pqma-soundness"));
  rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rec;
}

// ---------------------------------------------------------------------------
// Example instances.

/// V = SWAP . CNOT(w -> x) on one witness and one instance qubit: accepts iff
/// w != x. |0>, |1> are yes instances with perfect completeness; |+>, |->
/// are no instances with soundness 1/2.
inline Matrix xor_verifier() { return gates::SWAP(1) * gates::CNOT(); }

inline PqmaInstance example_pqma_instance(const std::string& which) {
  const RegisterLayout x{{"x", 1}}, w{{"w", 1}};
  const double h = 1 / std::sqrt(2.0);
  auto state = [&](double a, double b) { return PureState(Vector{{a, b}}, x); };
  if (which == "zero") return {"zero", state(1, 0), MixedState(PureState::basis(w, 1)), xor_verifier(), true, 0.0};
  if (which == "one") return {"one", state(0, 1), MixedState(PureState::basis(w, 0)), xor_verifier(), true, 0.0};
  if (which == "plus") return {"plus", state(h, h), MixedState(PureState::basis(w, 0)), xor_verifier(), false, 0.0};
  if (which == "minus") return {"minus", state(h, -h), MixedState(PureState::basis(w, 0)), xor_verifier(), false, 0.0};
  throw ConfigError("unknown pqma instance '" + which + "'");
}

}  // namespace qzk
