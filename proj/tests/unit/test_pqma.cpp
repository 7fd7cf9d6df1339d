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

#include "qzk/pqma/pqma.hpp"

using namespace qzk;

namespace {

// Acceptance by explicit enumeration of (S, s*) for per-copy pass and
// final-test probabilities.
double enumerate_acceptance(const std::vector<double>& a, const std::vector<double>& f, int q) {
  const int p = static_cast<int>(a.size());
  double total = 0, count = 0;
  for (int mask = 0; mask < (1 << p); ++mask) {
    if (__builtin_popcount(mask) != q) continue;
    double pass = 1;
    for (int s = 0; s < p; ++s)
      if (mask >> s & 1) pass *= a[s];
    for (int star = 0; star < p; ++star) {
      if (mask >> star & 1) continue;
      total += pass * f[star];
      count += 1;
    }
  }
  return total / count;
}

Matrix pure(const Vector& v) { return v * v.adjoint(); }

Vector ket(double a, double b) { return Vector{{a, b}}; }

}  // namespace

TEST_CASE("soundness bound", "[pqma]") {
  const double b = soundness_bound(1e9, 1000, 2);
  CHECK(b == Catch::Approx(std::sqrt(4e6 / (1e9 - 1e3)) + std::pow(0.99, 1000) + 1 / std::sqrt(50.0)).epsilon(1e-14));
  CHECK(b == Catch::Approx(0.2047).margin(1e-4));
  CHECK_THROWS_AS(soundness_bound(10, 0, 1), PreconditionError);
  CHECK_THROWS_AS(soundness_bound(5, 5, 1), PreconditionError);
  double prev = soundness_bound(11, 10, 1);
  for (double p = 12; p < 1e12; p *= 3.7) {
    const double cur = soundness_bound(p, 10, 1);
    CHECK(cur <= prev);
    prev = cur;
  }
  CHECK(soundness_bound(20, 10, 1) > 1.0);
}

TEST_CASE("pqma execution examples", "[pqma]") {
  const auto zero = example_pqma_instance("zero");
  const auto plus = example_pqma_instance("plus");
  SECTION("honest completeness is exact in both modes") {
    for (auto mode : {PqmaMode::Product, PqmaMode::Entangled}) {
      PqmaParams prm{3, 1, 1, mode};
      for (const char* name : {"zero", "one"}) {
        const auto inst = example_pqma_instance(name);
        auto r = pqma_exact(prm, inst, PqmaProverInput::honest(prm, inst), MixedState(inst.psi));
        CHECK(r.accept == Catch::Approx(1.0).margin(1e-12));
        CHECK(r.abort == Catch::Approx(0.0).margin(1e-12));
      }
    }
    PqmaParams big{10'000'000, 100, 1};
    CHECK(pqma_exact(big, zero, PqmaProverInput::honest(big, zero), MixedState(zero.psi)).accept == Catch::Approx(1.0).margin(1e-12));
  }
  SECTION("orthogonal copies pass each SWAP test with probability 1/2") {
    for (std::int64_t q : {1, 2, 5, 20}) {
      PqmaParams prm{1000, q, 1};
      // |1> copies against |0>, witness |0>: final test accepts with certainty.
      auto in = PqmaProverInput::product({{prm.p, kron(pure(ket(1, 0)), pure(ket(0, 1)))}});
      auto r = pqma_exact(prm, zero, in, MixedState(zero.psi));
      CHECK(r.accept + r.reject == Catch::Approx(std::pow(0.5, q)).epsilon(1e-12));
      CHECK(r.accept == Catch::Approx(std::pow(0.5, q)).epsilon(1e-12));
    }
  }
  SECTION("correct copies with a bad witness") {
    PqmaParams prm{50, 4, 1};
    const double h = 1 / std::sqrt(2.0);
    // accepts iff w != x; x = 0, so the witness must read 1.
    for (auto [w, expect] : std::vector<std::pair<Vector, double>>{{ket(1, 0), 0.0}, {ket(h, h), 0.5}, {ket(0.6, 0.8), 0.64}}) {
      auto in = PqmaProverInput::product({{prm.p, kron(pure(w), zero.psi.density())}});
      auto r = pqma_exact(prm, zero, in, MixedState(zero.psi));
      CHECK(r.abort == Catch::Approx(0.0).margin(1e-12));
      CHECK(r.accept == Catch::Approx(expect).margin(1e-12));
    }
    CHECK(plus.best_witness(plus.psi.density()).first == Catch::Approx(0.5).margin(1e-12));
  }
  SECTION("shape errors") {
    PqmaParams prm{3, 1, 1};
    auto bad = PqmaProverInput::product({{2, kron(pure(ket(1, 0)), pure(ket(1, 0)))}});
    CHECK_THROWS_AS(pqma_exact(prm, zero, bad, MixedState(zero.psi)), DimensionError);
    CHECK_THROWS_AS(pqma_exact(PqmaParams{3, 3, 1}, zero, bad, MixedState(zero.psi)), PreconditionError);
    PqmaParams ent{8, 1, 1, PqmaMode::Entangled};
    CHECK_THROWS_AS(PqmaProverInput::honest(ent, zero), CapExceeded);
  }
}

TEST_CASE("pqma exact acceptance against enumeration", "[pqma]") {
  Rng rng(11);
  const auto inst = example_pqma_instance("plus");
  const RegisterLayout pair{{"w", 1}, {"x", 1}};
  for (int trial = 0; trial < 10; ++trial) {
    const int p = 7, q = 1 + trial % 4;
    std::vector<Matrix> copies;
    std::vector<CopyClass> classes;
    for (int i = 0; i < 3; ++i) copies.push_back(random_mixed_state(pair, rng).matrix());
    const std::vector<std::int64_t> counts{3, 1, 3};
    std::vector<double> a, f;
    for (int c = 0; c < 3; ++c) {
      classes.push_back({counts[c], copies[c]});
      const Matrix x = kernel::reduce(copies[c], 2, {1});
      for (int k = 0; k < counts[c]; ++k) {
        a.push_back(0.5 * (1 + (x * inst.psi.density()).trace().real()));
        f.push_back(inst.final_accept(copies[c]));
      }
    }
    PqmaParams prm{p, q, 1};
    const double exact = pqma_exact(prm, inst, PqmaProverInput::product(classes), MixedState(inst.psi)).accept;
    CHECK(exact == Catch::Approx(enumerate_acceptance(a, f, q)).margin(1e-12));
  }
}

TEST_CASE("pqma entangled mode agrees with product mode", "[pqma]") {
  Rng rng(12);
  const auto inst = example_pqma_instance("minus");
  const RegisterLayout pair{{"w", 1}, {"x", 1}};
  for (int trial = 0; trial < 4; ++trial) {
    const std::int64_t q = 1 + trial % 2;
    std::vector<Matrix> c{random_mixed_state(pair, rng).matrix(), random_mixed_state(pair, rng).matrix()};
    // Copies (c0, c1, c0): joint product state and its relabeling (c1, c0, c0).
    PqmaParams prod{3, q, 1}, ent{3, q, 1, PqmaMode::Entangled};
    const auto vcopy = MixedState(inst.psi);
    auto pr = pqma_exact(prod, inst, PqmaProverInput::product({{2, c[0]}, {1, c[1]}}), vcopy);
    auto e1 = pqma_exact(ent, inst, PqmaProverInput::entangled(kron(kron(c[0], c[1]), c[0])), vcopy);
    auto e2 = pqma_exact(ent, inst, PqmaProverInput::entangled(kron(kron(c[1], c[0]), c[0])), vcopy);
    CHECK(e1.accept == Catch::Approx(pr.accept).margin(1e-12));
    CHECK(e1.abort == Catch::Approx(pr.abort).margin(1e-12));
    CHECK(e2.accept == Catch::Approx(pr.accept).margin(1e-12));
  }
}

TEST_CASE("pqma sampled runs match exact values", "[pqma]") {
  const auto inst = example_pqma_instance("plus");
  const std::size_t trials = 4000;
  auto check = [&](const PqmaParams& prm, const PqmaProverInput& in, std::uint64_t seed) {
    const auto ex = pqma_exact(prm, inst, in, MixedState(inst.psi));
    Rng rng(seed);
    std::size_t acc = 0, ab = 0;
    for (std::size_t t = 0; t < trials; ++t) {
      auto o = run_pqma(prm, inst, in, MixedState(inst.psi), rng);
      acc += o == PqmaOutcome::Accept;
      ab += o == PqmaOutcome::Abort;
    }
    CHECK(std::abs(acc / double(trials) - ex.accept) <= 3 * binomial_sigma(ex.accept, trials) + 1e-12);
    CHECK(std::abs(ab / double(trials) - ex.abort) <= 3 * binomial_sigma(ex.abort, trials) + 1e-12);
  };
  PqmaParams big{1'000'000, 10, 1};
  auto planted = PqmaProverInput::product({{300'000, kron(pure(ket(0, 1)), pure(ket(1, 0)))}, {700'000, kron(pure(ket(1, 0)), inst.psi.density())}});
  check(big, planted, 1);
  PqmaParams ent{3, 1, 1, PqmaMode::Entangled};
  Rng rng(5);
  check(ent, PqmaProverInput::entangled(random_mixed_state(RegisterLayout{{"P", 6}}, rng).matrix()), 2);
  CHECK(pqma_repeated_acceptance(big, inst, planted, MixedState(inst.psi), 3) ==
        Catch::Approx(std::pow(pqma_exact(big, inst, planted, MixedState(inst.psi)).accept, 3)));
}

TEST_CASE("pqma honest-verifier simulator", "[pqma]") {
  const auto zero = example_pqma_instance("zero");
  PqmaParams prm{5, 2, 1};
  Rng rng(21);
  SECTION("honest verifier input") {
    auto vin = product_verifier_input(prm, zero.psi.density());
    auto sim = hv_simulate_pqma(prm, simulator_copies(zero, 2), vin, rng);
    auto real = pqma_real_view(prm, zero, vin);
    CHECK(trace_distance(sim.view.cq, real.cq) <= 1e-9);
    const double run = pqma_exact(prm, zero, PqmaProverInput::honest(prm, zero), MixedState(zero.psi)).accept;
    CHECK(sim.view.accept() == Catch::Approx(run).margin(1e-9));
  }
  SECTION("orthogonal verifier copies") {
    auto vin = product_verifier_input(prm, pure(ket(0, 1)));
    auto sim = hv_simulate_pqma(prm, simulator_copies(zero, 2), vin, rng);
    CHECK(sim.view.accept() == Catch::Approx(0.25).margin(1e-12));
    CHECK(trace_distance(sim.view.cq, pqma_real_view(prm, zero, vin).cq) <= 1e-9);
  }
  SECTION("verifier holds halves of entangled pairs") {
    // Registers (V1, V2, P1, P2) with (Vi, Pi) Bell pairs.
    Vector bell = Vector::Zero(4);
    bell(0) = bell(3) = 1 / std::sqrt(2.0);
    Matrix j = kernel::permute(Matrix(kron(pure(bell), pure(bell))), 4, {0, 2, 1, 3});
    PqmaVerifierInput vin{j, 2};
    for (const char* name : {"zero", "one"}) {
      const auto inst = example_pqma_instance(name);
      auto sim = hv_simulate_pqma(prm, simulator_copies(inst, 3), vin, rng);
      auto real = pqma_real_view(prm, inst, vin);
      CHECK(trace_distance(sim.view.cq, real.cq) <= 1e-9);
      CHECK(sim.view.accept() == Catch::Approx(std::pow(0.75, 2)).margin(1e-12));
      CHECK(sim.residual.trace().real() == Catch::Approx(1.0).margin(1e-12));
    }
  }
  SECTION("the simulator does not depend on the witness") {
    auto other = zero;
    other.witness = MixedState(PureState::basis(RegisterLayout{{"w", 1}}, 0));
    Rng r1(3), r2(3);
    Rng vr(4);
    PqmaVerifierInput vin{random_mixed_state(RegisterLayout{{"V", 2}, {"P", 1}}, vr).matrix(), 1};
    auto a = hv_simulate_pqma(prm, simulator_copies(zero, 2), vin, r1);
    auto b = hv_simulate_pqma(prm, simulator_copies(other, 2), vin, r2);
    CHECK(trace_distance(a.view.cq, b.view.cq) <= 1e-12);
    CHECK(a.output == b.output);
    CHECK(max_abs(a.residual - b.residual) <= 1e-12);
  }
  SECTION("sampled outputs agree") {
    Rng vr(8);
    PqmaVerifierInput vin{random_mixed_state(RegisterLayout{{"V", 2}, {"P", 1}}, vr).matrix(), 1};
    const std::size_t trials = 4000;
    std::size_t s = 0, r = 0;
    Rng a(30), b(31);
    for (std::size_t t = 0; t < trials; ++t) {
      s += hv_simulate_pqma(prm, simulator_copies(zero, 2), vin, a).output;
      r += sample_pqma_real_output(prm, zero, vin, b);
    }
    const double pa = pqma_real_view(prm, zero, vin).accept();
    CHECK(std::abs(s / double(trials) - r / double(trials)) <= 3 * std::sqrt(2.0) * binomial_sigma(pa, trials));
  }
  SECTION("copy budget") {
    auto vin = product_verifier_input(prm, zero.psi.density());
    CHECK_THROWS_AS(hv_simulate_pqma(prm, simulator_copies(zero, 1), vin, rng), PreconditionError);
  }
}

TEST_CASE("pqma cheating harness", "[pqma]") {
  const auto plus = example_pqma_instance("plus");
  PqmaParams prm{10'000'000, 100, 1};
  Rng rng(40);
  SECTION("bad witness and orthogonal copies") {
    auto rec = cheat_harness(prm, plus, "bad-witness", 2000, rng);
    CHECK(rec.passed());
    CHECK(rec.rows.back().verdict == Verdict::Pass);
    CHECK(rec.rows.front().reference.value() == Catch::Approx(0.5).margin(1e-6));
    auto orth = cheat_harness(prm, plus, "orthogonal-copies", 500, rng);
    CHECK(orth.rows.front().reference.value() == Catch::Approx(std::pow(0.5, 100) * 0.5).epsilon(1e-6));
  }
  SECTION("every family stays below the bound") {
    auto rec = cheat_harness(PqmaParams{10'000'000, 60, 1}, plus, "all", 300, rng);
    CHECK(rec.passed());
    CHECK(rec.count(Verdict::Vacuous) == 0);
  }
  SECTION("vacuous bound") {
    auto rec = cheat_harness(PqmaParams{100, 10, 1}, plus, "bad-witness", 100, rng);
    CHECK(rec.count(Verdict::Vacuous) == 2);
    CHECK(rec.count(Verdict::Pass) == 1);
  }
  CHECK_THROWS_AS(cheat_harness(prm, plus, "nope", 10, rng), ConfigError);
}
