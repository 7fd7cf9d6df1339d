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

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "qzk/protocol/interactive.hpp"
#include "qzk/protocol/optimal.hpp"

using namespace qzk;

namespace {

// W = 1, M = 1, R = 0; one round.
InteractiveProtocol one_round(const Matrix& v1) {
  InteractiveProtocol p;
  p.name = "toy";
  p.w_qubits = 1;
  p.m_qubits = 1;
  p.initial = basis_state(4, 0);
  p.verifier = {{v1}};
  return p;
}

ProverStrategy single(const Matrix& u, const char* label) {
  ProverStrategy s;
  s.r_qubits = 0;
  s.label = label;
  s.rounds = {{u}};
  return s;
}

// CNOT with control M (qubit 1), target W (qubit 0).
Matrix cnot_m_to_w() { return gates::SWAP() * gates::CNOT() * gates::SWAP(); }

}  // namespace

TEST_CASE("run_protocol basic examples", "[protocol]") {
  SECTION("verifier writes 1 unconditionally") {
    auto p = one_round(kron(gates::X(), gates::I()));
    p.validate();
    CHECK(run_protocol(p, single(gates::I(), "id")) == Catch::Approx(1.0).margin(1e-12));
  }
  SECTION("verifier requires M = 1, identity prover leaves M = 0") {
    auto p = one_round(cnot_m_to_w());
    CHECK(run_protocol(p, identity_strategy(p)) == Catch::Approx(0.0).margin(1e-12));
    CHECK(run_protocol(p, single(gates::X(), "x")) == Catch::Approx(1.0).margin(1e-12));
  }
  SECTION("hand-computed amplitude: Ry(theta), then H on M and copy to W") {
    // Ry(t)|0> = (c, s); H gives ((c+s)/sqrt2, (c-s)/sqrt2); accept = (1 - sin t)/2.
    auto p = one_round(cnot_m_to_w() * kron(gates::I(), gates::H()));
    for (double t : {0.0, 0.3, 1.1, 2.5}) {
      CHECK(run_protocol(p, single(gates::Ry(t), "ry")) == Catch::Approx((1 - std::sin(t)) / 2).margin(1e-12));
    }
  }
  SECTION("strategy register violations") {
    auto p = one_round(cnot_m_to_w());
    CHECK_THROWS_AS(run_protocol(p, single(gates::I(2), "too big")), RegisterError);
    ProverStrategy two = single(gates::I(), "two rounds");
    two.rounds.push_back({gates::I()});
    CHECK_THROWS_AS(run_protocol(p, two), PreconditionError);
  }
}

TEST_CASE("verifier contractions count as rejection", "[protocol]") {
  // V = |0><0| on M (check), then X on W.
  Matrix check = kron(gates::X(), Matrix(basis_state(2, 0) * basis_state(2, 0).adjoint()));
  auto p = one_round(check);
  p.validate();
  CHECK(run_protocol(p, single(gates::H(), "h")) == Catch::Approx(0.5).margin(1e-12));
  Rng rng(7);
  int aborts = 0;
  for (int t = 0; t < 2000; ++t) aborts += sample_run(p, single(gates::H(), "h"), {std::nullopt}, rng).aborted;
  CHECK(std::abs(aborts / 2000.0 - 0.5) < 3 * std::sqrt(0.25 / 2000));
}

TEST_CASE("sample_run agrees with run_protocol", "[protocol]") {
  // Two rounds, two coins per round, random contractions and prover.
  Rng rng(11);
  InteractiveProtocol p;
  p.name = "coins";
  p.r_qubits = 1;
  p.w_qubits = 1;
  p.m_qubits = 1;
  p.initial = random_vector(8, rng);
  p.coin_outcomes = {2, 2};
  p.verifier = {{random_unitary(4, rng), random_unitary(4, rng)},
                {random_unitary(4, rng), random_unitary(4, rng), random_unitary(4, rng), random_unitary(4, rng)}};
  p.validate();
  const auto s = random_strategy(p, 1, rng);
  const double exact = run_protocol(p, s);
  const int trials = 10000;
  int acc = 0;
  for (int t = 0; t < trials; ++t) {
    auto trng = Rng::for_trial(5, "sample", static_cast<std::uint64_t>(t));
    acc += sample_run(p, s, {std::nullopt, std::nullopt}, trng).accepted;
  }
  const double sigma = std::sqrt(exact * (1 - exact) / trials);
  CHECK(std::abs(acc / double(trials) - exact) <= 3 * sigma + 1e-12);

  SECTION("fixed coins and replay") {
    double mix = 0;
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) mix += 0.25 * run_protocol_with_coins(p, s, {a, b});
    CHECK(mix == Catch::Approx(exact).margin(1e-12));
    Rng r1(99), r2(99);
    auto x = sample_run(p, s, {1, std::nullopt}, r1);
    auto y = sample_run(p, s, {1, std::nullopt}, r2);
    CHECK(x.coins == y.coins);
    CHECK(x.accepted == y.accepted);
    REQUIRE(x.transcript.size() == y.transcript.size());
    for (std::size_t i = 0; i < x.transcript.size(); ++i) CHECK(max_abs(x.transcript[i].state.matrix() - y.transcript[i].state.matrix()) == 0.0);
    CHECK(x.coins[0] == 1);
    CHECK_THROWS_AS(sample_run(p, s, {std::nullopt}, r1), PreconditionError);
    CHECK_THROWS_AS(sample_run(p, s, {2, std::nullopt}, r1), PreconditionError);
  }
}

TEST_CASE("deterministic protocols sample their exact outcome", "[protocol]") {
  auto p = one_round(cnot_m_to_w());
  Rng rng(3);
  for (int t = 0; t < 50; ++t) {
    CHECK(sample_run(p, single(gates::X(), "x"), {std::nullopt}, rng).accepted);
    CHECK_FALSE(sample_run(p, identity_strategy(p), {std::nullopt}, rng).accepted);
  }
}

TEST_CASE("verifier views", "[protocol]") {
  Rng rng(21);
  InteractiveProtocol p;
  p.name = "views";
  p.r_qubits = 1;
  p.w_qubits = 1;
  p.m_qubits = 1;
  p.initial = random_vector(8, rng);
  p.verifier = {{random_unitary(4, rng)}, {random_unitary(4, rng)}};
  p.validate();
  auto id = identity_strategy(p);
  auto view1 = verifier_view(p, id, 1);
  PureState init(p.initial, p.layout());
  CHECK(max_abs(view1.state.matrix() - partial_trace(init, {"R"}).matrix()) < 1e-12);
  auto s = random_strategy(p, 1, rng);
  for (int i = 1; i <= p.messages(); ++i) {
    auto v = verifier_view(p, s, i);
    CHECK(v.state.purity() <= 1 + 1e-12);
    CHECK(is_psd(v.state.matrix()));
  }
  CHECK_THROWS_AS(verifier_view(p, s, 0), PreconditionError);
  CHECK_THROWS_AS(verifier_view(p, s, 4), PreconditionError);
}

TEST_CASE("principal-angle value examples", "[protocol]") {
  Rng rng(4);
  const RegisterLayout w1{{"W", 1}};
  SECTION("identical subspaces give 1") {
    // Pi_B = |0><0|; V2 = X makes Pi_A = |0><0|.
    CHECK(optimal_three_message_value(gates::I(), gates::X(), PureState::basis(w1, 0)) == Catch::Approx(1.0).margin(1e-12));
  }
  SECTION("|0> against |+> gives 1/2") {
    // V2 = X H maps |+> to |1>, so Pi_A = |+><+|.
    CHECK(optimal_three_message_value(gates::I(), gates::X() * gates::H(), PureState::basis(w1, 0)) ==
          Catch::Approx(0.5).margin(1e-12));
  }
  SECTION("agrees with the alternating-ascent oracle") {
    for (int k = 0; k < 6; ++k) {
      auto psi = random_pure_state(w1, rng);
      Matrix v1 = kron(random_unitary(2, rng), random_unitary(2, rng));
      Matrix v2 = random_unitary(4, rng);
      auto p = three_message_protocol(v1, v2, psi, 1, 1);
      auto bf = brute_force_prover_value(p, rng);
      CHECK(std::abs(bf.value - optimal_three_message_value(v1, v2, psi)) < 1e-6);
    }
  }
}

TEST_CASE("brute-force oracle properties", "[protocol]") {
  Rng rng(8);
  SECTION("accept-everything verifier reaches 1 in one sweep") {
    auto p = one_round(kron(gates::X(), gates::I()));
    auto bf = brute_force_prover_value(p, rng, {1, 1, 1e-10, 0});
    CHECK(bf.value == Catch::Approx(1.0).margin(1e-12));
  }
  SECTION("honest value is a lower bound; sweeps are monotone; restarts never hurt") {
    auto psi = random_pure_state(RegisterLayout{{"W", 1}}, rng);
    auto p = three_message_protocol(random_unitary(4, rng), random_unitary(4, rng), psi, 1, 1);
    ProverStrategy h = random_strategy(p, 1, rng);
    h.kind = ProverStrategy::Kind::Honest;
    p.honest = h;
    auto few = brute_force_prover_value(p, rng, {200, 1, 1e-10, 1});
    auto many = brute_force_prover_value(p, rng, {200, 4, 1e-10, 1});
    CHECK(few.value >= run_protocol(p, h) - 1e-9);
    CHECK(many.value >= few.value - 1e-12);
    for (const auto& tr : many.traces)
      for (std::size_t i = 1; i < tr.size(); ++i) CHECK(tr[i] >= tr[i - 1] - 1e-12);
    CHECK(run_protocol(p, many.best) == Catch::Approx(many.value).margin(1e-9));
  }
  SECTION("coin-dependent rounds") {
    InteractiveProtocol p;
    p.name = "coin";
    p.r_qubits = 1;
    p.w_qubits = 1;
    p.m_qubits = 1;
    p.initial = basis_state(8, 0);
    p.coin_outcomes = {2, 1};
    p.verifier = {{random_unitary(4, rng), random_unitary(4, rng)}, {random_unitary(4, rng)}};
    auto bf = brute_force_prover_value(p, rng, {200, 4, 1e-10, 1});
    for (int t = 0; t < 20; ++t) CHECK(run_protocol(p, random_strategy(p, 1, rng)) <= bf.value + 1e-9);
  }
  SECTION("rejects more than three rounds") {
    auto p = one_round(gates::I(2));
    p.verifier.assign(4, {gates::I(2)});
    CHECK_THROWS_AS(brute_force_prover_value(p, rng), PreconditionError);
  }
}
