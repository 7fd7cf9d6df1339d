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
#include <cmath>

#include "qzk/compilers/public_coin.hpp"
#include "qzk/crypto/ideal.hpp"

namespace qzk {

/// Stage IV: ell sequential runs of the public-coin protocol whose challenge
/// comes from the ideal XOR coin (prover = party A, verifier = party B).
/// Accepts iff every run accepts.
inline CompiledProtocol make_malicious_zk(const InteractiveProtocol& base, int ell) {
  if (ell < 1) throw PreconditionError("make_malicious_zk: need ell >= 1");
  CompiledProtocol cp = make_public_coin(base);
  cp.stage = Stage::Malicious;
  cp.reps = ell;
  cp.protocol.name = base.name + "/IV";
  cp.soundness = [ell](double zeta) { return std::pow(public_coin_soundness(zeta), ell); };
  return cp;
}

/// Classical malicious verifier: its XOR input is 1 with probability
/// `bias`; after learning the coin b in run j it aborts with probability
/// abort[j][b] (the last entry repeats; empty means never).
struct MaliciousVerifier {
  std::string label = "honest";
  double bias = 0.5;
  std::vector<std::array<double, 2>> abort;

  double abort_prob(int run, int b) const {
    if (abort.empty()) return 0.0;
    return abort[std::min<std::size_t>(static_cast<std::size_t>(run), abort.size() - 1)][b];
  }
  void validate() const {
    auto ok = [](double x) { return x >= 0 && x <= 1; };
    if (!ok(bias)) throw PreconditionError("MaliciousVerifier: bias outside [0, 1]");
    for (const auto& a : abort)
      if (!ok(a[0]) || !ok(a[1])) throw PreconditionError("MaliciousVerifier: abort probability outside [0, 1]");
  }
};

inline MixedState coin_input(double p_one) {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = 1 - p_one;
  m(1, 1) = p_one;
  return MixedState(m, RegisterLayout{{"b", 1}});
}

/// Distribution of the coin delivered to the verifier, from the XOR
/// functionality on the parties' input distributions.
inline std::array<double, 2> xor_coin_distribution(double prover_p1, double verifier_p1) {
  const Matrix out = xor_functionality().apply(kron(coin_input(prover_p1).matrix(), coin_input(verifier_p1).matrix()));
  const Matrix b = kernel::reduce(out, 2, {1});
  return {b(0, 0).real(), b(1, 1).real()};
}

struct MaliciousRunStats {
  std::int64_t trials = 0, accepted = 0;
  std::array<std::int64_t, 2> coins{};
  double chi_square = 0;  // coin uniformity, 1 degree of freedom
  double p_value = 1;
};

/// Sampled runs of the full protocol against prover s (a strategy for the
/// public-coin protocol) and an honest verifier. The prover's XOR input is
/// 1 with probability prover_p1.
inline MaliciousRunStats run_malicious_zk(const CompiledProtocol& cp, const ProverStrategy& s, std::int64_t trials, Rng& rng,
                                          double prover_p1 = 0.5) {
  if (cp.stage != Stage::Malicious) throw PreconditionError("run_malicious_zk: not a stage IV protocol");
  if (trials < 1) throw PreconditionError("run_malicious_zk: need at least one trial");
  MaliciousRunStats st;
  st.trials = trials;
  for (std::int64_t t = 0; t < trials; ++t) {
    bool all = true;
    for (int j = 0; j < cp.reps && all; ++j) {
      IdealSession session(xor_functionality());
      const auto out = ideal_compute(session, bit_state(rng.bernoulli(prover_p1)), bit_state(rng.bernoulli(0.5)), rng);
      const int b = read_bit(*out.out_b, rng);
      ++st.coins[b];
      all = sample_run(cp.protocol, s, {b, 0}, rng).accepted;
    }
    st.accepted += all;
  }
  const double n = static_cast<double>(st.coins[0] + st.coins[1]);
  const double d = static_cast<double>(st.coins[0]) - n / 2;
  st.chi_square = 4 * d * d / n;
  st.p_value = std::erfc(std::sqrt(st.chi_square / 2));
  return st;
}

/// Exact acceptance: the mean branch value to the power ell.
inline double malicious_zk_acceptance(const CompiledProtocol& cp, const ProverStrategy& s) {
  const auto a = public_coin_branch_values(cp, s);
  return std::pow(0.5 * (a[0] + a[1]), cp.reps);
}

/// Verifier's view as a block mixture over the abort point: block a < ell
/// holds runs 1..a completed and run a + 1 aborted after its coin; block
/// ell holds all runs completed. Blocks are unnormalized; their traces are
/// the block probabilities. A completed run contributes the classical coin
/// with the (Keep, Mb) reply; an aborted run the coin with the stored state.
struct MaliciousView {
  std::vector<Matrix> blocks;

  double probability(std::size_t a) const { return blocks.at(a).trace().real(); }
};

namespace detail {

inline MaliciousView assemble_view(const PublicCoinView& v, const std::array<double, 2>& q, const MaliciousVerifier& ver, int ell) {
  auto cq = [](const std::array<double, 2>& w, const std::array<Matrix, 2>& m) {
    Matrix out = Matrix::Zero(2 * m[0].rows(), 2 * m[0].cols());
    for (int b = 0; b < 2; ++b) out.block(b * m[0].rows(), b * m[0].cols(), m[0].rows(), m[0].cols()) = w[b] * m[b];
    return out;
  };
  MaliciousView out;
  Matrix prefix = Matrix::Ones(1, 1);
  for (int j = 0; j < ell; ++j) {
    const std::array<double, 2> stop{q[0] * ver.abort_prob(j, 0), q[1] * ver.abort_prob(j, 1)};
    const std::array<double, 2> go{q[0] - stop[0], q[1] - stop[1]};
    out.blocks.push_back(kron(prefix, cq(stop, {v.stored.matrix(), v.stored.matrix()})));
    prefix = kron(prefix, cq(go, {v.reply[0].matrix(), v.reply[1].matrix()}));
  }
  out.blocks.push_back(prefix);
  return out;
}

}  // namespace detail

/// Exact view against the prover s with uniform XOR input.
inline MaliciousView real_malicious_view(const CompiledProtocol& cp, const ProverStrategy& s, const MaliciousVerifier& ver) {
  if (cp.stage != Stage::Malicious) throw PreconditionError("real_malicious_view: not a stage IV protocol");
  ver.validate();
  check_cap(cp.reps * (1 + cp.base().w_qubits + cp.base().m_qubits), "real_malicious_view");
  return detail::assemble_view(public_coin_real_view(cp, s), xor_coin_distribution(0.5, ver.bias), ver, cp.reps);
}

/// Simulated view: the simulator programs a uniform coin into the verifier's
/// output and answers from the honest-verifier simulation; the verifier's
/// abort rule is applied unchanged.
inline MaliciousView zk_simulated_view(const CompiledProtocol& cp, const HvzkSimulator& sim, const MaliciousVerifier& ver) {
  if (cp.stage != Stage::Malicious) throw PreconditionError("zk_simulated_view: not a stage IV protocol");
  ver.validate();
  check_cap(cp.reps * (1 + cp.base().w_qubits + cp.base().m_qubits), "zk_simulated_view");
  return detail::assemble_view(hv_simulate_public_coin(cp, sim).view, {0.5, 0.5}, ver, cp.reps);
}

/// Sum over blocks of half the trace norm of the difference.
inline double view_distance(const MaliciousView& a, const MaliciousView& b) {
  if (a.blocks.size() != b.blocks.size()) throw DimensionError("view_distance: different run counts");
  double d = 0;
  for (std::size_t i = 0; i < a.blocks.size(); ++i) d += 0.5 * trace_norm_hermitian(a.blocks[i] - b.blocks[i]);
  return d;
}

/// One sampled interaction outcome: coins seen and the abort point
/// (ell when no abort).
struct MaliciousSample {
  std::vector<int> coins;
  int abort_at = 0;
};

/// Real interaction with a corrupted verifier (party B of each session).
inline MaliciousSample sample_malicious_real(const CompiledProtocol& cp, const MaliciousVerifier& ver, Rng& rng) {
  MaliciousSample out;
  out.abort_at = cp.reps;
  for (int j = 0; j < cp.reps; ++j) {
    IdealSession session(xor_functionality(), Party::B);
    session.abort_probability = [&](const Matrix& b) { return ver.abort_prob(j, b(1, 1).real() > 0.5 ? 1 : 0); };
    const auto o = ideal_compute(session, bit_state(rng.bernoulli(0.5)), bit_state(rng.bernoulli(ver.bias)), rng);
    out.coins.push_back(read_bit(*o.out_b, rng));
    if (o.abort) {
      out.abort_at = j;
      break;
    }
  }
  return out;
}

/// Simulated interaction: the coin is drawn by the simulator and programmed
/// into the verifier's output; the simulator's copy budget must cover ell runs.
inline MaliciousSample zk_simulate_malicious(const CompiledProtocol& cp, const HvzkSimulator& sim, const MaliciousVerifier& ver,
                                             Rng& rng) {
  if (sim.copy_budget < cp.reps) throw PreconditionError("zk_simulate_malicious: copy budget below the run count");
  sim.validate(cp.base());
  MaliciousSample out;
  out.abort_at = cp.reps;
  for (int j = 0; j < cp.reps; ++j) {
    const int b = static_cast<int>(rng.below(2));
    IdealSession session(xor_functionality(), Party::B);
    session.program = [b](const Matrix&) { return bit_state(b).matrix(); };
    session.abort_probability = [&](const Matrix&) { return ver.abort_prob(j, b); };
    const auto o = ideal_compute(session, bit_state(0), bit_state(rng.bernoulli(ver.bias)), rng);
    out.coins.push_back(read_bit(*o.out_b, rng));
    if (o.abort) {
      out.abort_at = j;
      break;
    }
  }
  return out;
}

}  // namespace qzk
