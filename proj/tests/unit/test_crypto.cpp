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

#include "qzk/crypto/commitment.hpp"
#include "qzk/crypto/ideal.hpp"
#include "qzk/crypto/mac.hpp"

using namespace qzk;

namespace {

Matrix proj(std::size_t dim, std::size_t i) {
  Matrix p = Matrix::Zero(dim, dim);
  p(i, i) = 1;
  return p;
}


}  // namespace

TEST_CASE("ideal functionality examples", "[crypto]") {
  Rng rng(1);
  SECTION("xor coin") {
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        IdealSession s(xor_functionality());
        auto out = ideal_compute(s, bit_state(a), bit_state(b), rng);
        CHECK(out.out_a->matrix()((a ^ b), (a ^ b)).real() == Catch::Approx(1.0));
        CHECK(out.out_b->matrix()((a ^ b), (a ^ b)).real() == Catch::Approx(1.0));
        CHECK_FALSE(out.abort);
      }
  }
  SECTION("identity functionality is exactly the channel") {
    auto a = random_mixed_state(RegisterLayout{{"A", 1}}, rng);
    auto b = random_mixed_state(RegisterLayout{{"B", 1}}, rng);
    IdealSession s(identity_functionality(1, 1));
    auto out = ideal_compute(s, a, b, rng);
    CHECK(trace_distance(out.joint->matrix(), kron(a.matrix(), b.matrix())) < 1e-12);
    CHECK(trace_distance(*out.out_a, a) < 1e-12);
    CHECK_THROWS_AS(ideal_compute(s, a, b, rng), PreconditionError);
  }
  SECTION("corrupted party aborts after seeing its output") {
    IdealSession s(xor_functionality(), Party::A);
    s.abort_probability = [](const Matrix&) { return 1.0; };
    auto out = ideal_compute(s, bit_state(1), bit_state(0), rng);
    CHECK(out.abort);
    REQUIRE(out.out_a);
    CHECK(out.out_a->matrix()(1, 1).real() == Catch::Approx(1.0));
    CHECK_FALSE(out.out_b);
    CHECK_FALSE(out.joint);
  }
  SECTION("programmed output") {
    IdealSession s(xor_functionality(), Party::B);
    s.program = [](const Matrix&) { return proj(2, 0); };
    auto out = ideal_compute(s, bit_state(1), bit_state(0), rng);
    CHECK(out.out_b->matrix()(0, 0).real() == Catch::Approx(1.0));
    CHECK(out.out_a->matrix()(1, 1).real() == Catch::Approx(1.0));
  }
  SECTION("signature mismatch") {
    IdealSession s(xor_functionality());
    CHECK_THROWS_AS(ideal_compute(s, bit_state(1), MixedState::maximally_mixed(RegisterLayout{{"B", 2}}), rng), DimensionError);
  }
}

TEST_CASE("commitment examples", "[crypto]") {
  Rng rng(2);
  SECTION("identity scheme commits to the message itself") {
    auto m = random_mixed_state(RegisterLayout{{"M", 2}}, rng);
    CHECK(max_abs(commit(identity_commitment(2), m).matrix() - m.matrix()) < 1e-12);
  }
  SECTION("honest round trip for every scheme") {
    for (const auto& c : {identity_commitment(1), bell_commitment(1), cnot_chain_commitment(), bell_commitment(1).swapped()}) {
      for (int k = 0; k < 5; ++k) {
        auto m = random_mixed_state(RegisterLayout{{"M", 1}}, rng);
        auto r = verify_open(c, commit(c, m));
        CHECK(r.accept == Catch::Approx(1.0).margin(1e-12));
        CHECK(trace_distance(*r.message, m) < 1e-9);
      }
    }
  }
  SECTION("cnot chain by hand: |+> commits to GHZ, |1> to |111>") {
    auto c = cnot_chain_commitment();
    Vector ghz = Vector::Zero(8);
    ghz[0] = ghz[7] = 1 / std::sqrt(2.0);
    auto plus = PureState(gates::H() * basis_state(2, 0), RegisterLayout{{"M", 1}});
    CHECK(max_abs(commit(c, plus).matrix() - ghz * ghz.adjoint()) < 1e-12);
    CHECK(commit(c, PureState::basis(RegisterLayout{{"M", 1}}, 1)).matrix()(7, 7).real() == Catch::Approx(1.0));
  }
  SECTION("maximally mixed opening accepts with 2^-lambda") {
    for (const auto& c : {bell_commitment(1), cnot_chain_commitment()}) {
      auto r = verify_open(c, MixedState::maximally_mixed(c.cd_layout()));
      CHECK(r.accept == Catch::Approx(std::pow(2.0, -c.lambda)).margin(1e-12));
    }
  }
  SECTION("flipped ancilla under Com = Id is always rejected") {
    CanonicalCommitment c;
    c.name = "id-with-ancilla";
    c.n = 1;
    c.lambda = 1;
    c.com = gates::I(2);
    c.c_wires = {0};
    c.d_wires = {1};
    auto cd = commit(c, PureState::basis(RegisterLayout{{"M", 1}}, 0));
    auto flipped = apply_unitary(cd, UnitaryOp(gates::X(), {"D"}));
    CHECK(verify_open(c, flipped).accept == Catch::Approx(0.0).margin(1e-12));
    CHECK_FALSE(verify_open(c, flipped).message);
  }
  SECTION("size mismatch") {
    CHECK_THROWS_AS(commit(bell_commitment(1), MixedState::maximally_mixed(RegisterLayout{{"M", 2}})), DimensionError);
  }
}


TEST_CASE("double-opening game", "[crypto]") {
  Rng rng(3);
  const int trials = 10000;
  SECTION("guess independent of b wins half the time") {
    auto c = bell_commitment(1);
    auto a = coin_guesser(c);
    CHECK(double_open_exact(c, a).conditional_win() == Catch::Approx(0.5).margin(1e-12));
    int wins = 0, done = 0;
    for (int t = 0; t < trials; ++t) {
      auto r = run_double_open(c, a, rng);
      if (!r.aborted) ++done, wins += r.win;
    }
    CHECK(std::abs(wins / double(done) - 0.5) <= 3 * std::sqrt(0.25 / done));
  }
  SECTION("identity scheme is broken") {
    auto c = identity_commitment(1);
    auto a = x_attack(c);
    CHECK(double_open_exact(c, a).win == Catch::Approx(1.0).margin(1e-12));
    int wins = 0;
    for (int t = 0; t < 2000; ++t) wins += run_double_open(c, a, rng).win;
    CHECK(wins / 2000.0 > 0.6);
  }
  SECTION("bell scheme: every adversary wins exactly half of its non-aborted runs") {
    auto c = bell_commitment(1);
    for (int k = 0; k < 20; ++k) {
      auto ex = double_open_exact(c, random_adversary(c, rng));
      CHECK(ex.conditional_win() == Catch::Approx(0.5).margin(1e-9));
    }
  }
  SECTION("adversary abort") {
    auto c = bell_commitment(1);
    auto a = coin_guesser(c);
    a.abort_after_first = true;
    auto r = run_double_open(c, a, rng);
    CHECK(r.aborted);
    CHECK_FALSE(r.win);
    CHECK(double_open_exact(c, a).abort == 1.0);
  }
  SECTION("register misuse") {
    auto c = bell_commitment(1);
    auto a = coin_guesser(c);
    a.middle = gates::I(3);
    CHECK_THROWS_AS(run_double_open(c, a, rng), RegisterError);
  }
}

TEST_CASE("toy MAC", "[crypto]") {
  QuantumMac mac;  // m = 1, t = 3
  REQUIRE(mac.key_count() == 6144);
  Rng rng(4);
  SECTION("round trip is exact for every key") {
    auto m = random_mixed_state(RegisterLayout{{"M", 1}}, rng);
    const Matrix want = kron(m.matrix(), proj(2, 1));
    double worst = 0;
    for (std::size_t i = 0; i < mac.key_count(); ++i) {
      const auto k = mac.key(i);
      worst = std::max(worst, max_abs(mac_decode(mac, k, mac_encode(mac, k, m)).matrix() - want));
    }
    CHECK(worst < 1e-12);
    CHECK_THROWS_AS(mac.key(mac.key_count()), PreconditionError);
  }
  SECTION("identity attack keeps the flag at 1") {
    const Matrix rho = random_density(2, 2, rng);
    CHECK(mac_detection_probability(mac, gates::I(4), rho, 0) == Catch::Approx(0.0).margin(1e-12));
  }
  SECTION("X on one wire is detected with probability 3/4") {
    const Matrix rho = random_density(2, 2, rng);
    const Matrix x0 = kernel::embed(gates::X(), 4, {0});
    CHECK(mac_detection_probability(mac, x0, rho, 0) == Catch::Approx(0.75).margin(1e-12));
  }
  SECTION("real versus ideal") {
    const Matrix rho_mr = random_density(4, 4, rng);  // M and one reference qubit
    const Matrix id5 = gates::I(5);
    CHECK(mac_real_vs_ideal(mac, id5, rho_mr, 1, natural_mac_simulator(1.0, 1)) < 1e-12);
    // X on two code wires always hits a trap: natural simulator never accepts.
    const Matrix heavy = kernel::embed(kron(gates::X(), gates::X()), 5, {0, 1});
    CHECK(mac_detection_probability(mac, heavy, rho_mr, 1) == Catch::Approx(1.0).margin(1e-12));
    CHECK(mac_real_vs_ideal(mac, heavy, rho_mr, 1, natural_mac_simulator(0.0, 1)) <= 0.05);
    // Single X with a simulator that claims no detection: off by the gap.
    const Matrix x0 = kernel::embed(gates::X(), 5, {0});
    Vector plus = gates::H() * basis_state(2, 0);
    const Matrix rho_plus = kron(Matrix(plus * plus.adjoint()), random_density(2, 2, rng));
    CHECK(mac_real_vs_ideal(mac, x0, rho_plus, 1, natural_mac_simulator(1.0, 1)) == Catch::Approx(0.75).margin(1e-9));
    CHECK(mac_real_vs_ideal(mac, x0, rho_mr, 1, natural_mac_simulator(1.0, 1)) >= 0.75 - 1e-9);
  }
}
