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

#include "qzk/uhlmann/uhlmann.hpp"

using namespace qzk;
using Catch::Approx;

namespace {

UhlmannInstance bell_instance() {
  UhlmannInstance inst;
  inst.name = "bell";
  inst.c = gates::BellPrep();
  inst.d = kron(gates::I(), gates::X()) * gates::BellPrep();
  inst.delta = 2;
  inst.gamma = 32;
  return inst;
}

}  // namespace

TEST_CASE("Uhlmann unitary", "[uhlmann]") {
  Rng rng(71);

  SECTION("equal states give the identity action") {
    auto inst = bell_instance();
    inst.d = inst.c;
    const auto u = compute_uhlmann(inst);
    CHECK(u.residual < 1e-12);
    CHECK(max_abs(u.u - gates::I()) < 1e-9);
  }

  SECTION("Bell pair to X-rotated Bell pair") {
    const auto u = compute_uhlmann(bell_instance());
    CHECK(max_abs(u.u - gates::X()) < 1e-9);
    // Four-vector arithmetic.
    Vector bell = Vector::Zero(4);
    bell[0] = bell[3] = 1 / std::sqrt(2.0);
    Vector xbell = Vector::Zero(4);
    xbell[1] = xbell[2] = 1 / std::sqrt(2.0);
    CHECK((kron(gates::I(), u.u) * bell - xbell).norm() < 1e-12);
  }

  SECTION("random 2+2 instances") {
    for (int t = 0; t < 50; ++t) {
      const auto inst = random_uhlmann_instance(rng);
      const auto u = compute_uhlmann(inst);
      CHECK(u.residual < 1e-9);
      CHECK(is_unitary(u.u, 1e-9));
    }
  }

  SECTION("rank-deficient R half") {
    UhlmannInstance inst;
    inst.r_qubits = 1;
    inst.s_qubits = 2;
    inst.gamma = 32;
    inst.c = random_unitary(8, rng);
    inst.d = kernel::embed(random_unitary(4, rng), 3, {1, 2}) * inst.c;
    const auto u = compute_uhlmann(inst);
    CHECK(u.residual < 1e-9);
    CHECK(is_unitary(u.u, 1e-9));
    CHECK(u.completion.cols() == 2);
  }

  SECTION("invalid instances") {
    auto inst = bell_instance();
    inst.d = gates::I(2);
    CHECK_THROWS_AS(compute_uhlmann(inst), PreconditionError);
    inst = bell_instance();
    inst.c = gates::I(2);
    inst.d = gates::I(2);
    CHECK_THROWS_AS(compute_uhlmann(inst), PreconditionError);  // R half pure, not invertible
    inst = bell_instance();
    inst.gamma = 10;
    CHECK_THROWS_AS(inst.validate(), PreconditionError);
  }
}

TEST_CASE("Uhlmann protocol", "[uhlmann]") {
  Rng rng(81);
  const auto inst = random_uhlmann_instance(rng);
  const auto u = compute_uhlmann(inst);
  const MixedState target(PureState(inst.c_state(), inst.layout()));
  const MixedState ideal(PureState(inst.d_state(), inst.layout()));

  SECTION("honest prover") {
    const auto p = honest_uhlmann_prover(u);
    for (int t = 0; t < 20; ++t) {
      const auto run = run_uhlmann_protocol(inst, p, target, rng);
      REQUIRE(run.accepted);
      CHECK(trace_distance(*run.output, ideal) < 1e-9);
    }
    const auto mixed = MixedState::maximally_mixed(inst.layout());
    const auto run = run_uhlmann_protocol(inst, p, mixed, rng);
    CHECK(trace_distance(*run.output, mixed) < 1e-12);
  }

  SECTION("identity prover is caught per round") {
    const auto p = identity_uhlmann_prover(inst);
    const double f = std::norm(inst.d_state().dot(inst.c_state()));
    CHECK(uhlmann_test_pass(inst, p, 3) == Approx(f).margin(1e-12));
    CHECK(uhlmann_exact(inst, p, target).accept == Approx(std::pow(f, inst.gamma - 1)).margin(1e-12));
  }

  SECTION("acceptance does not depend on where T goes for uniform provers") {
    const auto p = perturbed_uhlmann_prover(inst, u, 0.05);
    const double pass = uhlmann_test_pass(inst, p, 1);
    CHECK(uhlmann_exact(inst, p, target).accept == Approx(std::pow(pass, inst.gamma - 1)).margin(1e-12));
  }

  SECTION("switching prover accepts but misplaces T when it hits i*") {
    const auto p = switching_uhlmann_prover(u, 5, gates::I(inst.s_qubits));
    const double f = std::norm(inst.d_state().dot(inst.c_state()));
    const auto ex = uhlmann_exact(inst, p, target);
    CHECK(ex.accept == Approx((1 + (inst.gamma - 1) * f) / inst.gamma).margin(1e-12));
    // Given i* = 5 the run always accepts and T is left untouched.
    const double miss = trace_distance(target, ideal);
    CHECK(miss > 0.5);
    CHECK(trace_distance(*ex.conditioned, ideal) == Approx(miss / (1 + (inst.gamma - 1) * f)).margin(1e-9));
    int hits = 0, accepted = 0;
    for (int t = 0; t < 400; ++t) {
      const auto run = run_uhlmann_protocol(inst, p, target, rng);
      if (run.i_star == 5) {
        ++hits;
        CHECK(run.accepted);
        CHECK(trace_distance(*run.output, target) < 1e-12);
      }
      accepted += run.accepted;
    }
    CHECK(hits > 0);
    CHECK(accepted >= hits);
  }

  SECTION("soundness check") {
    const auto honest = soundness_check(inst, honest_uhlmann_prover(u), 200, rng);
    CHECK(honest.passed());
    CHECK(honest.rows[0].value == 1.0);
    CHECK(honest.rows[1].value < 1e-9);
    const auto pert = soundness_check(inst, perturbed_uhlmann_prover(inst, u, 0.02), 2000, rng);
    CHECK(pert.passed());
    CHECK(pert.rows[0].value >= 0.5);
    CHECK(pert.rows[1].verdict == Verdict::Pass);
    const auto far = soundness_check(inst, identity_uhlmann_prover(inst), 200, rng);
    CHECK(far.passed());
    CHECK(far.rows[1].verdict == Verdict::NotApplicable);
  }
}

TEST_CASE("Uhlmann zero-knowledge simulator", "[uhlmann]") {
  Rng rng(91);
  const auto inst = random_uhlmann_instance(rng);
  const auto u = compute_uhlmann(inst);
  const MixedState c(PureState(inst.c_state(), inst.layout()));
  for (const UhlmannVerifier& v : {UhlmannVerifier{"honest", c, 7}, UhlmannVerifier{"mixed-T", MixedState::maximally_mixed(inst.layout()), 1},
                                   UhlmannVerifier{"random-T", random_mixed_state(inst.layout(), rng), inst.gamma}}) {
    UhlmannOracle oracle(u.u, 1);
    const auto sim = zk_simulate_uhlmann(inst, oracle, v, rng);
    CHECK(sim.oracle_calls == 1);
    CHECK(view_distance(sim.view, real_uhlmann_view(inst, u, v)) < 1e-9);
    CHECK_THROWS_AS(oracle.apply(inst, v.target), PreconditionError);
  }
  UhlmannOracle spent(u.u, 0);
  CHECK_THROWS_AS(zk_simulate_uhlmann(inst, spent, {"honest", c, 1}, rng), PreconditionError);
}
