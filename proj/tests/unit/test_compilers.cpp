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

#include "qzk/compilers.hpp"
#include "qzk/protocol/optimal.hpp"

using namespace qzk;
using Catch::Approx;

namespace {

double zeta_of(const InteractiveProtocol& base) {
  return optimal_three_message_value(base.verifier_op(0, 0), base.verifier_op(1, 0),
                                     PureState(detail::verifier_initial(base), RegisterLayout{{"W", base.w_qubits}}));
}

BruteForceOptions quick(int restarts = 4) {
  BruteForceOptions o;
  o.restarts = restarts;
  o.iterations = 300;
  o.tolerance = 1e-13;
  return o;
}

}  // namespace

TEST_CASE("soundness formulas match hand values", "[compilers]") {
  CHECK(collapsed_soundness(0, 2) == Approx(15.0 / 16).margin(1e-15));
  CHECK(collapsed_soundness(1, 5) == 1.0);
  CHECK(collapsed_soundness(0.3, 3) > collapsed_soundness(0.3, 2));
  CHECK(repeated_soundness(0.5, 10) == std::ldexp(1.0, -10));
  CHECK(public_coin_soundness(0) == 0.75);
  CHECK(public_coin_soundness(1) == 1.25);
  CHECK(public_coin_soundness(0.25) == Approx(1.0).margin(1e-15));
  CHECK(pipeline_soundness(0, 2, 1) == Approx(0.75 + std::sqrt(15.0 / 16) / 2).margin(1e-15));
  CHECK_THROWS_AS(collapsed_soundness(0.1, 1), PreconditionError);
  CHECK_THROWS_AS(repeated_soundness(0.1, 0), PreconditionError);
}

TEST_CASE("random perfect base has perfect completeness", "[compilers]") {
  Rng rng(11);
  for (int r = 1; r <= 3; ++r) {
    const auto base = random_perfect_base(rng, r, 1, 1, 1);
    CHECK(run_protocol(base, *base.honest) == Approx(1.0).margin(1e-9));
  }
}

TEST_CASE("sound base has the requested optimal value", "[compilers]") {
  Rng rng(17);
  BruteForceOptions opt;
  opt.restarts = 2;
  opt.iterations = 200;
  for (double zeta : {0.0, 0.1, 0.5, 0.9}) {
    const auto base = random_sound_base(rng, zeta, 1, 1, 1);
    const PureState in(detail::verifier_initial(base), RegisterLayout{{"W", 1}});
    CHECK(optimal_three_message_value(base.verifier_op(0, 0), base.verifier_op(1, 0), in) == Catch::Approx(zeta).margin(1e-9));
    CHECK(brute_force_prover_value(base, rng, opt).value == Catch::Approx(zeta).margin(1e-6));
  }
  CHECK_THROWS_AS(random_sound_base(rng, 1.5, 1, 1, 1), PreconditionError);
}

TEST_CASE("HVZK compiler", "[compilers]") {
  Rng rng(21);
  const auto base = random_perfect_base(rng, 2, 1, 1, 1);
  const auto cp = compile_hvzk(base, bell_commitment(1).swapped());
  CHECK(cp.protocol.rounds() == 2);

  SECTION("honest execution accepts") { CHECK(run_protocol(cp.protocol, *cp.protocol.honest) == Approx(1.0).margin(1e-9)); }

  SECTION("lifted strategies have the base acceptance") {
    for (int t = 0; t < 5; ++t) {
      const auto s = random_strategy(base, 1, rng);
      CHECK(run_protocol(cp.protocol, lift_to_hvzk(cp, s)) == Approx(run_protocol(base, s)).margin(1e-9));
    }
  }

  SECTION("base with coins") {
    auto coined = base;
    coined.coin_outcomes = {2, 1};
    coined.verifier[0] = {random_unitary(4, rng), random_unitary(4, rng)};
    coined.honest.reset();
    coined.validate();
    const auto c2 = compile_hvzk(coined, bell_commitment(1).swapped());
    const auto s = random_strategy(coined, 1, rng);
    CHECK(run_protocol(c2.protocol, lift_to_hvzk(c2, s)) == Approx(run_protocol(coined, s)).margin(1e-9));
  }

  SECTION("fresh C substitution is caught by the opening check") {
    const auto chain = compile_hvzk(base, cnot_chain_commitment());
    const auto& p = chain.protocol;
    // Extra R qubit in |0> swapped into C before the first opening.
    const int r = p.r_qubits + 1;
    const auto c = chain.wires("C");
    REQUIRE(c.size() == 1);
    ProverStrategy s = identity_strategy(p, r);
    const int n = r + p.m_qubits;
    s.rounds[0][0] = kernel::swap_wires(n, {r - 1}, {c[0] - p.w_qubits + 1});
    const auto w = detail::wires_for(p, r);
    Vector v = p.initial_with_prover(r);
    kernel::apply(v, w.n, w.prover, s.op(0, 0));
    kernel::apply(v, w.n, w.verifier, p.verifier_op(0, 0));
    const Vector psi = detail::verifier_initial(base);
    CHECK(v.squaredNorm() == Approx(std::norm(psi[0])).margin(1e-12));
    CHECK(run_protocol(p, s) <= std::norm(psi[0]) + 1e-12);
  }

  SECTION("message size must match the commitment") {
    CHECK_THROWS_AS(compile_hvzk(base, bell_commitment(2)), DimensionError);
  }
}

TEST_CASE("round collapse", "[compilers]") {
  Rng rng(31);

  SECTION("honest acceptance equals base completeness") {
    for (int t = 0; t < 3; ++t) {
      const auto base = random_perfect_base(rng, 2, 1, 1, 1);
      const auto cp = collapse_rounds(base);
      CHECK(cp.protocol.rounds() == 2);
      CHECK(run_protocol(cp.protocol, *cp.protocol.honest) == Approx(1.0).margin(1e-9));
    }
  }

  SECTION("three rounds") {
    const auto base = random_perfect_base(rng, 3, 1, 1, 1);
    const auto cp = collapse_rounds(base);
    CHECK(cp.protocol.coins(0) == 2);
    CHECK(run_protocol(cp.protocol, *cp.protocol.honest) == Approx(1.0).margin(1e-9));
    for (int i = 1; i <= 2; ++i) CHECK(run_protocol_with_coins(cp.protocol, *cp.protocol.honest, {i - 1, 0}) == Approx(1.0).margin(1e-9));
  }

  SECTION("branch overlap identity") {
    const auto base = random_base(rng, 2, 1, 1, 1);
    const auto cp = collapse_rounds(base);
    for (int t = 0; t < 10; ++t) {
      const auto s = random_strategy(cp.protocol, cp.protocol.r_qubits, rng);
      const auto o = collapsed_branch_overlap(cp, s, 1);
      REQUIRE(o.pass > 1e-6);
      CHECK(o.direct == Approx(o.formula).margin(1e-9));
    }
  }

  SECTION("cheating value stays below the bound") {
    for (int t = 0; t < 3; ++t) {
      const auto base = random_base(rng, 2, 1, 1, 1, true);
      const double zeta = zeta_of(base);
      const auto cp = collapse_rounds(base);
      const auto bf = brute_force_prover_value(cp.protocol, rng, quick(2));
      CHECK(bf.value <= collapsed_soundness(zeta, 2) + 1e-6);
    }
  }

  SECTION("simulation") {
    const auto base = random_perfect_base(rng, 2, 1, 1, 1);
    const auto cp = collapse_rounds(base);
    const auto t = hv_simulate_collapsed(cp, honest_stand_in(base), 1);
    CHECK(t.messages.size() == 3);
    CHECK(t.bell_check == Approx(1.0).margin(1e-9));
    CHECK(t.factorization_residual < 1e-9);
    auto wrong = honest_stand_in(base);
    wrong.ops[1] = random_unitary(4, rng);
    const auto bad = hv_simulate_collapsed(cp, wrong, 1);
    CHECK(bad.bell_check < 1 - 1e-6);
    CHECK(bad.factorization_residual > 1e-6);
  }

  SECTION("preconditions") {
    const auto one = random_perfect_base(rng, 1, 1, 1, 1);
    CHECK_THROWS_AS(collapse_rounds(one), PreconditionError);
    auto coined = random_base(rng, 2, 1, 1, 1);
    coined.coin_outcomes = {2, 1};
    coined.verifier[0] = {random_unitary(4, rng), random_unitary(4, rng)};
    CHECK_THROWS_AS(collapse_rounds(coined), PreconditionError);
  }
}

TEST_CASE("parallel repetition", "[compilers]") {
  Rng rng(41);
  const auto base = random_base(rng, 2, 1, 1, 1, true);
  CHECK(parallel_repeat(base, 1).protocol.initial == base.initial);

  SECTION("product of perfect bases accepts") {
    const auto perfect = random_perfect_base(rng, 2, 1, 1, 1);
    const auto cp = parallel_repeat(perfect, 2);
    CHECK(run_protocol(cp.protocol, *cp.protocol.honest) == Approx(1.0).margin(1e-9));
  }

  SECTION("product strategies multiply") {
    const auto cp = parallel_repeat(base, 2);
    const auto s1 = random_strategy(base, 1, rng), s2 = random_strategy(base, 1, rng);
    CHECK(run_protocol(cp.protocol, product_strategy(cp, {s1, s2})) ==
          Approx(run_protocol(base, s1) * run_protocol(base, s2)).margin(1e-9));
  }

  SECTION("coins split per copy") {
    auto coined = base;
    coined.coin_outcomes = {2, 1};
    coined.verifier[0] = {random_unitary(4, rng), random_unitary(4, rng)};
    coined.validate();
    const auto cp = parallel_repeat(coined, 2);
    CHECK(cp.protocol.coins(0) == 4);
    const auto s1 = random_strategy(coined, 1, rng), s2 = random_strategy(coined, 1, rng);
    CHECK(run_protocol(cp.protocol, product_strategy(cp, {s1, s2})) ==
          Approx(run_protocol(coined, s1) * run_protocol(coined, s2)).margin(1e-9));
  }

  SECTION("doubled optimum is the square") {
    const double zeta = zeta_of(base);
    const auto single = brute_force_prover_value(base, rng, quick());
    CHECK(single.value == Approx(zeta).margin(1e-6));
    const auto cp = parallel_repeat(base, 2);
    CHECK(run_protocol(cp.protocol, product_strategy(cp, {single.best})) == Approx(single.value * single.value).margin(1e-9));
    const auto doubled = brute_force_prover_value(cp.protocol, rng, quick());
    CHECK(doubled.value == Approx(zeta * zeta).margin(1e-6));
  }
}

TEST_CASE("public-coin compiler", "[compilers]") {
  Rng rng(51);

  SECTION("honest acceptance") {
    const auto base = random_perfect_base(rng, 2, 1, 1, 1);
    const auto cp = make_public_coin(base);
    const auto a = public_coin_branch_values(cp, *cp.protocol.honest);
    CHECK(a[0] == Approx(1.0).margin(1e-9));
    CHECK(a[1] == Approx(1.0).margin(1e-9));
    CHECK(run_protocol(cp.protocol, *cp.protocol.honest) == Approx(0.5 * (a[0] + a[1])).margin(1e-12));
  }

  SECTION("imperfect base: b = 0 branch is the base value") {
    const auto base = random_base(rng, 2, 1, 1, 1);
    const auto cp = make_public_coin(base);
    const auto s = random_strategy(base, 1, rng);
    const auto a = public_coin_branch_values(cp, public_coin_strategy(cp, s));
    CHECK(a[0] == Approx(run_protocol(base, s)).margin(1e-9));
    CHECK(a[1] == Approx(1.0).margin(1e-9));
  }

  SECTION("cheating value stays below the bound") {
    for (int t = 0; t < 3; ++t) {
      const auto base = random_base(rng, 2, 1, 1, 1, true);
      const double zeta = zeta_of(base);
      const auto cp = make_public_coin(base);
      const auto bf = brute_force_prover_value(cp.protocol, rng, quick(2));
      CHECK(bf.value <= public_coin_soundness(zeta) + 1e-6);
      CHECK(bf.value >= 0.5 * (zeta + 1) - 1e-3);
    }
  }

  SECTION("simulation matches the real view") {
    const auto base = random_perfect_base(rng, 2, 1, 1, 1);
    const auto cp = make_public_coin(base);
    const auto sim = hv_simulate_public_coin(cp, honest_stand_in(base));
    CHECK(sim.view.accept[0] == Approx(1.0).margin(1e-9));
    CHECK(sim.view.accept[1] == Approx(1.0).margin(1e-9));
    CHECK(sim.check.accept_povm == Approx(1.0).margin(1e-9));
    const auto real = public_coin_real_view(cp, *cp.protocol.honest);
    CHECK(trace_distance(real.stored, sim.view.stored) < 1e-9);
    for (int b = 0; b < 2; ++b) {
      CHECK(trace_distance(real.reply[b], sim.view.reply[b]) < 1e-9);
      // Sampled transcript with the challenge fixed.
      const auto run = sample_run(cp.protocol, *cp.protocol.honest, {b, 0}, rng);
      const detail::PublicCoinLayout L(base.r_qubits, base.w_qubits, base.m_qubits);
      const Matrix r = kernel::reduce(run.transcript[2].state.matrix(), cp.protocol.w_qubits + cp.protocol.m_qubits,
                                      detail::keep_mb_in_view(L));
      CHECK(trace_distance(r, real.reply[b].matrix()) < 1e-9);
    }
  }

  SECTION("challenge frequency") {
    const auto base = random_perfect_base(rng, 2, 1, 1, 1);
    const auto cp = make_public_coin(base);
    int ones = 0;
    const int n = 4000;
    for (int t = 0; t < n; ++t) ones += sample_run(cp.protocol, *cp.protocol.honest, {std::nullopt, 0}, rng).coins[0];
    CHECK(std::abs(ones - n / 2.0) <= 3 * std::sqrt(n * 0.25));
  }

  SECTION("needs three messages") {
    const auto base = random_perfect_base(rng, 3, 1, 1, 1);
    CHECK_THROWS_AS(make_public_coin(base), PreconditionError);
  }
}

TEST_CASE("malicious-verifier compiler", "[compilers]") {
  Rng rng(61);
  const auto base = random_perfect_base(rng, 2, 1, 1, 1);

  SECTION("coin distribution is uniform for any prover bias") {
    for (double bias : {0.0, 0.3, 1.0}) {
      const auto q = xor_coin_distribution(bias, 0.5);
      CHECK(q[0] == Approx(0.5).margin(1e-12));
      CHECK(xor_coin_distribution(0.5, bias)[1] == Approx(0.5).margin(1e-12));
    }
    const auto cp = make_malicious_zk(base, 1);
    const auto st = run_malicious_zk(cp, *cp.protocol.honest, 2000, rng, 0.95);
    CHECK(st.p_value > 0.001);
    CHECK(st.accepted == st.trials);
  }

  SECTION("sequential product law") {
    const auto imperfect = random_base(rng, 2, 1, 1, 1);
    const auto cp = make_malicious_zk(imperfect, 3);
    const auto s = public_coin_strategy(cp, random_strategy(imperfect, 1, rng));
    const auto a = public_coin_branch_values(cp, s);
    const double per = 0.5 * (a[0] + a[1]);
    CHECK(malicious_zk_acceptance(cp, s) == Approx(per * per * per).margin(1e-12));
    const std::int64_t n = 3000;
    const auto st = run_malicious_zk(cp, s, n, rng);
    const double p = per * per * per;
    CHECK(std::abs(static_cast<double>(st.accepted) / n - p) <= 3 * std::sqrt(p * (1 - p) / n) + 1e-9);
  }

  SECTION("simulated view equals real view, including aborts") {
    const auto cp = make_malicious_zk(base, 3);
    const auto sim = honest_stand_in(base, 3);
    for (const MaliciousVerifier& v : {MaliciousVerifier{}, MaliciousVerifier{"fixed-zero", 0.0, {}},
                                       MaliciousVerifier{"abort-second", 0.2, {{0, 0}, {0.3, 0.8}, {0, 0}}}}) {
      const auto real = real_malicious_view(cp, *cp.protocol.honest, v);
      const auto fake = zk_simulated_view(cp, sim, v);
      CHECK(view_distance(real, fake) < 1e-9);
      double total = 0;
      for (std::size_t a = 0; a < real.blocks.size(); ++a) total += real.probability(a);
      CHECK(total == Approx(1.0).margin(1e-12));
    }
    MaliciousVerifier abort2{"abort-second", 0.2, {{0, 0}, {0.3, 0.8}, {0, 0}}};
    const auto real = real_malicious_view(cp, *cp.protocol.honest, abort2);
    CHECK(real.probability(1) == Approx(0.55).margin(1e-12));
    int real_hits = 0, sim_hits = 0;
    const int n = 4000;
    for (int t = 0; t < n; ++t) {
      real_hits += sample_malicious_real(cp, abort2, rng).abort_at == 1;
      sim_hits += zk_simulate_malicious(cp, sim, abort2, rng).abort_at == 1;
    }
    const double sd = std::sqrt(0.55 * 0.45 / n);
    CHECK(std::abs(real_hits / double(n) - 0.55) <= 3 * sd);
    CHECK(std::abs(sim_hits / double(n) - 0.55) <= 3 * sd);
  }

  SECTION("wrong simulator is detected") {
    const auto cp = make_malicious_zk(base, 2);
    auto wrong = honest_stand_in(base, 2);
    wrong.ops[1] = random_unitary(4, rng);
    CHECK(view_distance(real_malicious_view(cp, *cp.protocol.honest, {}), zk_simulated_view(cp, wrong, {})) > 1e-3);
    CHECK_THROWS_AS(zk_simulate_malicious(cp, honest_stand_in(base, 1), {}, rng), PreconditionError);
  }
}
