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
#include <functional>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qzk/core.hpp"

namespace qzk {

/// Prover-side operations, one per round. rounds[i][g] is the unitary on
/// R then M used in round i after verifier coin history g (coins of rounds
/// 0..i-1, mixed radix, first coin most significant). A row of size 1 is
/// shared by all histories.
struct ProverStrategy {
  enum class Kind { Honest, Adversarial };
  Kind kind = Kind::Adversarial;
  int r_qubits = 0;
  std::vector<std::vector<Matrix>> rounds;
  std::string label;

  const Matrix& op(std::size_t round, std::size_t history) const {
    const auto& row = rounds.at(round);
    return row.size() == 1 ? row[0] : row.at(history);
  }
};

/// Registers R (prover), W (verifier), M (message), in that order.
///
/// Round i: the prover applies P_i on R M, the verifier draws a uniform coin
/// c_i in [0, coin_outcomes[i]) and applies V_i(c_0..c_i) on W M. After the
/// last round the first qubit of W is measured; 1 accepts.
///
/// Verifier operations may be contractions (a unitary composed with a
/// projective check); lost norm is an abort, counted as rejection.
struct InteractiveProtocol {
  std::string name;
  int r_qubits = 0, w_qubits = 1, m_qubits = 0;
  Vector initial;
  std::vector<int> coin_outcomes;                // per round; 1 = no coin
  std::vector<std::vector<Matrix>> verifier;     // [round][history of c_0..c_i]
  std::optional<ProverStrategy> honest;

  int rounds() const { return static_cast<int>(verifier.size()); }
  int messages() const { return 2 * rounds() - 1; }
  int total_qubits() const { return r_qubits + w_qubits + m_qubits; }
  RegisterLayout layout() const { return layout_with_prover(r_qubits); }
  RegisterLayout layout_with_prover(int r) const {
    std::vector<Register> regs;
    if (r > 0) regs.push_back({"R", r});
    regs.push_back({"W", w_qubits});
    if (m_qubits > 0) regs.push_back({"M", m_qubits});
    return RegisterLayout(regs);
  }

  int coins(std::size_t round) const { return coin_outcomes.empty() ? 1 : coin_outcomes.at(round); }

  /// Number of coin histories c_0..c_{upto-1}.
  std::size_t histories(std::size_t upto) const {
    std::size_t h = 1;
    for (std::size_t i = 0; i < upto; ++i) h *= static_cast<std::size_t>(coins(i));
    return h;
  }

  const Matrix& verifier_op(std::size_t round, std::size_t history) const {
    const auto& row = verifier.at(round);
    return row.size() == 1 ? row[0] : row.at(history);
  }

  /// Checks sizes, unitarity of prover ops and contractivity of verifier ops.
  void validate() const {
    if (w_qubits < 1) throw PreconditionError(name + ": W must hold at least one qubit");
    if (verifier.empty()) throw PreconditionError(name + ": no rounds");
    if (!coin_outcomes.empty() && coin_outcomes.size() != verifier.size())
      throw PreconditionError(name + ": coin schedule length differs from round count");
    for (int c : coin_outcomes)
      if (c < 1) throw PreconditionError(name + ": coin outcome count must be positive");
    check_cap(total_qubits(), name);
    if (static_cast<std::size_t>(initial.size()) != pow2(total_qubits()))
      throw DimensionError(name + ": initial state size does not match registers");
    if (std::abs(initial.norm() - 1.0) > kTol) throw PreconditionError(name + ": initial state not normalized");
    const auto dv = pow2(w_qubits + m_qubits);
    for (std::size_t i = 0; i < verifier.size(); ++i) {
      const auto& row = verifier[i];
      if (row.size() != 1 && row.size() != histories(i + 1))
        throw PreconditionError(name + ": verifier round " + std::to_string(i + 1) + " has wrong branch count");
      for (const auto& v : row) {
        if (static_cast<std::size_t>(v.rows()) != dv || !is_square(v))
          throw DimensionError(name + ": verifier op does not act on W M");
        if (!is_contraction(v)) throw PreconditionError(name + ": verifier op is not a contraction");
      }
    }
    if (honest) check_strategy(*honest);
  }

  void check_strategy(const ProverStrategy& s) const {
    if (s.r_qubits < r_qubits) throw RegisterError(name + ": strategy R register smaller than the protocol's");
    check_cap(s.r_qubits + w_qubits + m_qubits, name + " with prover " + s.label);
    if (static_cast<int>(s.rounds.size()) != rounds())
      throw PreconditionError(name + ": strategy has " + std::to_string(s.rounds.size()) + " rounds, protocol " +
                              std::to_string(rounds()));
    const auto dp = pow2(s.r_qubits + m_qubits);
    for (std::size_t i = 0; i < s.rounds.size(); ++i) {
      if (s.rounds[i].size() != 1 && s.rounds[i].size() != histories(i))
        throw PreconditionError(name + ": strategy round " + std::to_string(i + 1) + " has wrong branch count");
      for (const auto& u : s.rounds[i]) {
        if (static_cast<std::size_t>(u.rows()) != dp || !is_square(u))
          throw RegisterError(name + ": prover op does not act on R M");
        if (!is_unitary(u, 1e-8)) throw PreconditionError(name + ": prover op is not unitary");
      }
    }
  }

  /// Initial vector with R padded by |0> qubits to r prover qubits.
  Vector initial_with_prover(int r) const {
    if (r == r_qubits) return initial;
    const std::size_t rest = pow2(w_qubits + m_qubits), pad = pow2(r - r_qubits);
    Vector v = Vector::Zero(pow2(r + w_qubits + m_qubits));
    for (std::size_t ri = 0; ri < pow2(r_qubits); ++ri)
      v.segment(static_cast<Eigen::Index>(ri * pad * rest), rest) = initial.segment(ri * rest, rest);
    return v;
  }
};

/// Reduced W M state after message i (R traced out).
struct TranscriptPoint {
  int index = 0;
  MixedState state;
};

/// Instance of a promise problem: a pure state with its label and copy counts.
struct PromiseInstance {
  PureState psi;
  bool yes = true;
  int prover_copies = 1, verifier_copies = 1, simulator_copies = 1;
  std::string family;
};

namespace detail {

struct Wires {
  int n = 0;
  std::vector<int> prover, verifier;
};

inline Wires wires_for(const InteractiveProtocol& p, int r) {
  Wires w;
  w.n = r + p.w_qubits + p.m_qubits;
  for (int q = 0; q < r; ++q) w.prover.push_back(q);
  for (int q = r; q < w.n; ++q) w.verifier.push_back(q);
  for (int q = r + p.w_qubits; q < w.n; ++q) w.prover.push_back(q);
  return w;
}

/// Squared norm of the first-W-qubit = 1 component.
inline double accept_weight(const Vector& v, int n, int first_w) {
  double s = 0;
  const std::size_t bit = std::size_t{1} << (n - 1 - first_w);
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (static_cast<std::size_t>(i) & bit) s += std::norm(v[i]);
  return s;
}

inline void project_accept(Vector& v, int n, int first_w) {
  const std::size_t bit = std::size_t{1} << (n - 1 - first_w);
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (!(static_cast<std::size_t>(i) & bit)) v[i] = 0;
}

}  // namespace detail

/// Visits every coin history with its probability and the final
/// (sub-normalized) state; `at_message` sees the state after each message.
inline void for_each_branch(const InteractiveProtocol& p, const ProverStrategy& s,
                            const std::function<void(double weight, const std::vector<int>& coins, const Vector& state)>& leaf,
                            const std::function<void(int message, double weight, const Vector& state)>& at_message = {}) {
  p.check_strategy(s);
  const auto w = detail::wires_for(p, s.r_qubits);
  std::vector<int> coins;
  std::function<void(int, std::size_t, double, Vector)> rec = [&](int round, std::size_t hist, double weight, Vector v) {
    if (round == p.rounds()) {
      leaf(weight, coins, v);
      return;
    }
    kernel::apply(v, w.n, w.prover, s.op(round, hist));
    if (at_message) at_message(2 * round + 1, weight, v);
    const int nc = p.coins(round);
    for (int c = 0; c < nc; ++c) {
      Vector u = v;
      const std::size_t h2 = hist * nc + c;
      kernel::apply(u, w.n, w.verifier, p.verifier_op(round, h2));
      if (at_message && round + 1 < p.rounds()) at_message(2 * round + 2, weight / nc, u);
      coins.push_back(c);
      rec(round + 1, h2, weight / nc, std::move(u));
      coins.pop_back();
    }
  };
  rec(0, 0, 1.0, p.initial_with_prover(s.r_qubits));
}

/// Exact acceptance probability, averaged over verifier coins.
inline double run_protocol(const InteractiveProtocol& p, const ProverStrategy& s) {
  const int n = s.r_qubits + p.w_qubits + p.m_qubits;
  double acc = 0;
  for_each_branch(p, s, [&](double wgt, const std::vector<int>&, const Vector& v) { acc += wgt * detail::accept_weight(v, n, s.r_qubits); });
  return std::clamp(acc, 0.0, 1.0);
}

/// Exact acceptance for one fixed coin history.
inline double run_protocol_with_coins(const InteractiveProtocol& p, const ProverStrategy& s, const std::vector<int>& coins) {
  if (static_cast<int>(coins.size()) != p.rounds()) throw PreconditionError("run_protocol_with_coins: schedule length mismatch");
  const int n = s.r_qubits + p.w_qubits + p.m_qubits;
  double acc = -1;
  for_each_branch(p, s, [&](double, const std::vector<int>& c, const Vector& v) {
    if (c == coins) acc = detail::accept_weight(v, n, s.r_qubits);
  });
  if (acc < 0) throw PreconditionError("run_protocol_with_coins: coin value out of range");
  return acc;
}

/// Reduced W M state after message i in 1..m, averaged over coins and
/// conditioned on no abort so far.
inline TranscriptPoint verifier_view(const InteractiveProtocol& p, const ProverStrategy& s, int i) {
  if (i < 1 || i > p.messages()) throw PreconditionError("verifier_view: message index " + std::to_string(i) + " out of range");
  const auto w = detail::wires_for(p, s.r_qubits);
  std::vector<int> keep;
  for (int q = s.r_qubits; q < w.n; ++q) keep.push_back(q);
  Matrix acc = Matrix::Zero(pow2(p.w_qubits + p.m_qubits), pow2(p.w_qubits + p.m_qubits));
  for_each_branch(
      p, s, [](double, const std::vector<int>&, const Vector&) {},
      [&](int msg, double wgt, const Vector& v) {
        if (msg == i) acc += wgt * kernel::reduce(v, w.n, keep);
      });
  return {i, MixedState::normalized(0.5 * (acc + acc.adjoint()), p.layout_with_prover(0))};
}

struct SampledRun {
  bool accepted = false;
  bool aborted = false;  // lost norm in a verifier check
  std::vector<int> coins;
  std::vector<TranscriptPoint> transcript;
};

/// One sampled execution. coin_schedule[i] fixes round i's coin; empty
/// entries are drawn uniformly. Verifier checks and the final measurement
/// are sampled.
inline SampledRun sample_run(const InteractiveProtocol& p, const ProverStrategy& s, const std::vector<std::optional<int>>& coin_schedule,
                             Rng& rng) {
  if (static_cast<int>(coin_schedule.size()) != p.rounds()) throw PreconditionError("sample_run: coin schedule length mismatch");
  p.check_strategy(s);
  const auto w = detail::wires_for(p, s.r_qubits);
  std::vector<int> keep;
  for (int q = s.r_qubits; q < w.n; ++q) keep.push_back(q);
  auto view = [&](int msg, const Vector& v) {
    Matrix r = kernel::reduce(v, w.n, keep);
    return TranscriptPoint{msg, MixedState::normalized(0.5 * (r + r.adjoint()), p.layout_with_prover(0))};
  };
  SampledRun out;
  Vector v = p.initial_with_prover(s.r_qubits);
  std::size_t hist = 0;
  for (int round = 0; round < p.rounds(); ++round) {
    kernel::apply(v, w.n, w.prover, s.op(round, hist));
    out.transcript.push_back(view(2 * round + 1, v));
    const int nc = p.coins(round);
    int c = 0;
    if (coin_schedule[round]) {
      c = *coin_schedule[round];
      if (c < 0 || c >= nc) throw PreconditionError("sample_run: coin value out of range");
    } else {
      c = static_cast<int>(rng.below(static_cast<std::uint64_t>(nc)));
    }
    out.coins.push_back(c);
    hist = hist * nc + c;
    kernel::apply(v, w.n, w.verifier, p.verifier_op(round, hist));
    const double kept = v.squaredNorm();
    if (!rng.bernoulli(kept)) {
      out.aborted = true;
      return out;
    }
    v /= std::sqrt(kept);
    if (round + 1 < p.rounds()) out.transcript.push_back(view(2 * round + 2, v));
  }
  out.accepted = rng.bernoulli(detail::accept_weight(v, w.n, s.r_qubits));
  return out;
}

/// Strategy whose every round is the identity (the prover does nothing).
inline ProverStrategy identity_strategy(const InteractiveProtocol& p, int r_qubits = -1) {
  ProverStrategy s;
  s.r_qubits = r_qubits < 0 ? p.r_qubits : r_qubits;
  s.label = "identity";
  for (int i = 0; i < p.rounds(); ++i) s.rounds.push_back({gates::I(s.r_qubits + p.m_qubits)});
  return s;
}

/// Haar-random strategy with one unitary per (round, coin history).
inline ProverStrategy random_strategy(const InteractiveProtocol& p, int r_qubits, Rng& rng) {
  ProverStrategy s;
  s.r_qubits = r_qubits;
  s.label = "random";
  for (int i = 0; i < p.rounds(); ++i) {
    std::vector<Matrix> row;
    for (std::size_t h = 0; h < p.histories(static_cast<std::size_t>(i)); ++h)
      row.push_back(random_unitary(pow2(r_qubits + p.m_qubits), rng));
    s.rounds.push_back(std::move(row));
  }
  return s;
}

/// Honest strategy with R padded by idle qubits.
inline ProverStrategy pad_strategy(const InteractiveProtocol& p, const ProverStrategy& s, int r_qubits) {
  if (r_qubits < s.r_qubits) throw RegisterError("pad_strategy: cannot shrink R");
  if (r_qubits == s.r_qubits) return s;
  ProverStrategy out = s;
  out.r_qubits = r_qubits;
  // R = [R_s, pad]; M follows. Move pad to the end, apply, move back.
  const int n = r_qubits + p.m_qubits;
  std::vector<int> qs;
  for (int q = 0; q < s.r_qubits; ++q) qs.push_back(q);
  for (int q = r_qubits; q < n; ++q) qs.push_back(q);
  for (auto& row : out.rounds)
    for (auto& u : row) u = kernel::embed(u, n, qs);
  return out;
}

}  // namespace qzk
