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
#include <map>
#include <vector>

#include "qzk/protocol/interactive.hpp"

namespace qzk {

/// Three-message protocol: prover message on M, V1 on W M, prover reply,
/// V2 on W M, first W qubit measured. W starts in psi_v, R and M in |0>.
inline InteractiveProtocol three_message_protocol(const Matrix& v1, const Matrix& v2, const PureState& psi_v, int m_qubits,
                                                  int r_qubits, std::string name = "three-message") {
  InteractiveProtocol p;
  p.name = std::move(name);
  p.r_qubits = r_qubits;
  p.w_qubits = psi_v.layout().total_qubits();
  p.m_qubits = m_qubits;
  p.initial = kron(kron(basis_state(pow2(r_qubits), 0), psi_v.amplitudes()), basis_state(pow2(m_qubits), 0));
  p.verifier = {{v1}, {v2}};
  p.validate();
  return p;
}

/// Largest acceptance of any prover against (V1, V2) on W = psi_v, via the
/// principal angle between Pi_A = V2^dagger (|1><1| x Id) V2 and
/// Pi_B = V1 (|psi_v><psi_v| x Id_M) V1^dagger: sigma_max(Pi_A Pi_B)^2.
///
/// Exact when V1 does not entangle W with M; an SDP lower bound otherwise.
inline double optimal_three_message_value(const Matrix& v1, const Matrix& v2, const PureState& psi_v) {
  if (v1.rows() != v2.rows() || !is_square(v1) || !is_square(v2))
    throw DimensionError("optimal_three_message_value: V1 and V2 differ in size");
  const int n = log2_exact(static_cast<std::size_t>(v1.rows()));
  const int w = psi_v.layout().total_qubits();
  if (w > n) throw DimensionError("optimal_three_message_value: psi_v larger than W M");
  const auto dm = pow2(n - w);
  Matrix one = Matrix::Zero(2, 2);
  one(1, 1) = 1;
  const Matrix acc = kron(kron(one, gates::I(w - 1)), Matrix::Identity(dm, dm));
  const Matrix pa = v2.adjoint() * acc * v2;
  const Matrix pb = v1 * kron(psi_v.density(), Matrix::Identity(dm, dm)) * v1.adjoint();
  Eigen::JacobiSVD<Matrix> svd(pa * pb);
  const double s = svd.singularValues()(0);
  return std::min(1.0, s * s);
}

struct BruteForceOptions {
  int iterations = 200;
  int restarts = 16;
  double tolerance = 1e-10;
  int r_qubits = -1;  // prover register; default max(protocol R, M)
};

struct BruteForceResult {
  double value = 0.0;
  ProverStrategy best;
  std::vector<double> restart_values;
  std::vector<std::vector<double>> traces;  // objective after each sweep
};

namespace detail {

/// Forward pass recording the state before each prover op, keyed by
/// (round, coin history of earlier rounds), and the projected leaves.
struct ForwardPass {
  std::vector<std::vector<Vector>> before;  // [round][history]
  std::vector<Vector> leaves;               // [full history], projected on accept
  std::vector<double> weights;
  double value = 0.0;
};

inline ForwardPass forward_pass(const InteractiveProtocol& p, const ProverStrategy& s) {
  const auto w = wires_for(p, s.r_qubits);
  ForwardPass f;
  f.before.resize(p.rounds());
  for (int i = 0; i < p.rounds(); ++i) f.before[i].resize(p.histories(i));
  f.leaves.resize(p.histories(p.rounds()));
  f.weights.resize(f.leaves.size());
  std::function<void(int, std::size_t, double, Vector)> rec = [&](int round, std::size_t hist, double wgt, Vector v) {
    if (round == p.rounds()) {
      project_accept(v, w.n, s.r_qubits);
      f.value += wgt * v.squaredNorm();
      f.weights[hist] = wgt;
      f.leaves[hist] = std::move(v);
      return;
    }
    f.before[round][hist] = v;
    kernel::apply(v, w.n, w.prover, s.op(round, hist));
    const int nc = p.coins(round);
    for (int c = 0; c < nc; ++c) {
      Vector u = v;
      kernel::apply(u, w.n, w.verifier, p.verifier_op(round, hist * nc + c));
      rec(round + 1, hist * nc + c, wgt / nc, std::move(u));
    }
  };
  rec(0, 0, 1.0, p.initial_with_prover(s.r_qubits));
  return f;
}

/// Sum over histories h extending g at round i of w_h B_h^dagger y_h, where
/// B_h is everything applied after P_i.
inline Vector backward_sum(const InteractiveProtocol& p, const ProverStrategy& s, const ForwardPass& f, int round, std::size_t g) {
  const auto w = wires_for(p, s.r_qubits);
  const std::size_t span = p.histories(p.rounds()) / p.histories(round);
  Vector total = Vector::Zero(pow2(w.n));
  for (std::size_t leaf = g * span; leaf < (g + 1) * span; ++leaf) {
    Vector b = f.weights[leaf] * f.leaves[leaf];
    // Walk back: V_{r-1}, P_{r-1}, ..., V_round.
    for (int j = p.rounds() - 1; j >= round; --j) {
      const std::size_t hv = leaf / (p.histories(p.rounds()) / p.histories(j + 1));
      kernel::apply(b, w.n, w.verifier, p.verifier_op(j, hv).adjoint());
      if (j > round) {
        const std::size_t hp = leaf / (p.histories(p.rounds()) / p.histories(j));
        kernel::apply(b, w.n, w.prover, s.op(j, hp).adjoint());
      }
    }
    total += b;
  }
  return total;
}

inline ProverStrategy expand_branches(const InteractiveProtocol& p, ProverStrategy s) {
  for (int i = 0; i < p.rounds(); ++i)
    if (s.rounds[i].size() == 1 && p.histories(i) > 1) s.rounds[i].assign(p.histories(i), s.rounds[i][0]);
  return s;
}

}  // namespace detail

/// Alternating maximization of the acceptance over prover unitaries. Each
/// step replaces one round's unitary by the polar alignment of the
/// environment-contracted operator, which never decreases the objective.
inline BruteForceResult brute_force_prover_value(const InteractiveProtocol& p, Rng& rng, BruteForceOptions opt = {}) {
  p.validate();
  if (p.rounds() > 3) throw PreconditionError("brute_force_prover_value: more than 3 rounds");
  const int r = opt.r_qubits < 0 ? std::max(p.r_qubits, p.m_qubits) : opt.r_qubits;
  check_cap(r + p.w_qubits + p.m_qubits, "brute_force_prover_value");
  const auto w = detail::wires_for(p, r);
  BruteForceResult out;
  out.value = -1;
  for (int restart = 0; restart < std::max(1, opt.restarts); ++restart) {
    ProverStrategy s;
    if (restart == 0 && p.honest && p.honest->r_qubits <= r) {
      s = pad_strategy(p, *p.honest, r);
    } else {
      Rng sub = rng.split(static_cast<std::uint64_t>(restart));
      s = random_strategy(p, r, sub);
    }
    s = detail::expand_branches(p, std::move(s));
    s.kind = ProverStrategy::Kind::Adversarial;
    s.label = "brute-force";
    std::vector<double> trace;
    double prev = detail::forward_pass(p, s).value;
    trace.push_back(prev);
    for (int it = 0; it < opt.iterations; ++it) {
      for (int i = 0; i < p.rounds(); ++i) {
        for (std::size_t g = 0; g < p.histories(i); ++g) {
          const auto f = detail::forward_pass(p, s);
          const Vector b = detail::backward_sum(p, s, f, i, g);
          const Matrix a_mat = kernel::split(f.before[i][g], w.n, w.prover);
          const Matrix b_mat = kernel::split(b, w.n, w.prover);
          const Matrix k = a_mat * b_mat.adjoint();
          if (max_abs(k) < 1e-300) continue;
          s.rounds[i][g] = polar_align(k);
        }
      }
      const double now = detail::forward_pass(p, s).value;
      trace.push_back(now);
      if (now - prev < opt.tolerance) break;
      prev = now;
    }
    const double v = trace.back();
    out.restart_values.push_back(v);
    out.traces.push_back(std::move(trace));
    if (v > out.value) {
      out.value = v;
      out.best = s;
    }
  }
  out.value = std::clamp(out.value, 0.0, 1.0);
  return out;
}

}  // namespace qzk
