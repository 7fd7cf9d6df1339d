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
#include <chrono>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "qzk/compilers.hpp"
#include "qzk/crypto/mac.hpp"
#include "qzk/harness/config.hpp"
#include "qzk/harness/instances.hpp"
#include "qzk/harness/record.hpp"
#include "qzk/protocol/io.hpp"
#include "qzk/protocol/optimal.hpp"

namespace qzk {

namespace detail {

inline std::string fmt(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

/// Largest deviation from an exact identity; passes when <= tol.
inline MetricRow max_deviation_row(std::string name, double dev, std::string source, double tol) {
  return equality_row(std::move(name), dev, 0.0, 0.0, std::move(source), tol);
}

/// Tracks the sample with the largest value - bound.
struct WorstCase {
  double value = 0, bound = 0, sigma = 0;
  double excess = -std::numeric_limits<double>::infinity();
  std::size_t count = 0;

  void add(double v, double b, double s = 0) {
    ++count;
    if (v - b - 3 * s > excess) excess = v - b - 3 * s, value = v, bound = b, sigma = s;
  }
  MetricRow row(std::string name, std::string source, double tol) const {
    return upper_bound_row(std::move(name), value, bound, sigma, std::move(source), tol);
  }
};

inline BruteForceOptions ascent_options(const ExperimentConfig& cfg) {
  BruteForceOptions o;
  o.restarts = static_cast<int>(cfg.get_int("restarts"));
  o.iterations = static_cast<int>(cfg.get_int("iterations"));
  o.tolerance = 1e-13;
  return o;
}

inline PureState verifier_input(const InteractiveProtocol& base) {
  return PureState(verifier_initial(base), RegisterLayout{{"W", base.w_qubits}});
}

/// Optimal value of a coinless 3-message base: the principal-angle value,
/// raised to the ascent value when V_1 entangles W with M.
inline double three_message_zeta(const InteractiveProtocol& base, Rng& rng, const BruteForceOptions& opt) {
  require_three_message(base, "three_message_zeta");
  require_no_coins(base, "three_message_zeta");
  const double angle = optimal_three_message_value(base.verifier_op(0, 0), base.verifier_op(1, 0), verifier_input(base));
  return std::max(angle, brute_force_prover_value(base, rng, opt).value);
}

inline std::optional<InteractiveProtocol> protocol_instance(const ExperimentConfig& cfg) {
  if (cfg.instance.is_null()) return std::nullopt;
  return protocol_from_json(cfg.instance);
}

inline void no_instance(const ExperimentConfig& cfg) {
  if (!cfg.instance.is_null()) throw ConfigError("invalid config:\n  instance: kind '" + cfg.kind + "' takes no instance file");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// core-check: SWAP-test paths, fidelity and distance identities, gentle
// measurement, Haar moments.

inline ExperimentRecord run_core_check(const ExperimentConfig& cfg) {
  detail::no_instance(cfg);
  ExperimentRecord rec;
  const Rng master(cfg.seed);
  const double tol = cfg.tol_exact;
  const auto dims = [&](Rng& r) { return pow2(1 + static_cast<int>(r.below(static_cast<std::uint64_t>(std::log2(cfg.get_int("max_dim")))))); };

  {  // SWAP test: circuit against POVM, and the overlap formula.
    Rng rng = master.split("swap");
    double dev = 0, formula = 0, oracle = 0;
    const auto kmax = static_cast<std::uint64_t>(cfg.get_int("swap_max_qubits"));
    for (std::int64_t i = 0; i < cfg.get_int("swap_pairs"); ++i) {
      const int k = 1 + static_cast<int>(rng.below(kmax));
      const RegisterLayout l{{"A", k}};
      const MixedState rho = i % 3 == 0 ? MixedState(random_pure_state(l, rng)) : random_mixed_state(l, rng);
      const PureState psi = random_pure_state(l, rng);
      const auto r = swap_test(rho, psi);
      dev = std::max(dev, std::abs(r.accept - r.accept_povm));
      const double f = (psi.amplitudes().adjoint() * rho.matrix() * psi.amplitudes())(0, 0).real();
      oracle = std::max(oracle, std::abs(r.accept - (1 + f) / 2));
      // Constructed overlap f: phi = sqrt(f) psi + sqrt(1 - f) psi_perp.
      const double g = static_cast<double>(i % 11) / 10.0;
      Vector perp = random_vector(pow2(k), rng);
      perp -= psi.amplitudes() * psi.amplitudes().dot(perp);
      const Vector phi = std::sqrt(g) * psi.amplitudes() + std::sqrt(1 - g) * perp.normalized();
      formula = std::max(formula, std::abs(swap_test(PureState(phi, l), psi).accept - (1 + g) / 2));
    }
    rec.add(detail::max_deviation_row("swap-test.circuit-vs-povm", dev, "identity:swap-povm", tol));
    rec.add(detail::max_deviation_row("swap-test.vs-overlap", oracle, "identity:swap-povm", tol));
    rec.add(detail::max_deviation_row("swap-test.constructed-overlap", formula, "identity:swap-povm", tol));
  }

  {  // Fidelity: reverse triangle, pure-state consistency.
    Rng rng = master.split("fidelity");
    double excess = -1, root_excess = -1, pure = 0, sym = 0;
    std::int64_t violations = 0;
    for (std::int64_t i = 0; i < cfg.get_int("triples"); ++i) {
      const auto d = dims(rng);
      auto draw = [&] { return random_density(d, 1 + rng.below(d), rng); };
      const Matrix a = draw(), b = draw(), c = draw();
      const double fab = fidelity(a, b), fbc = fidelity(b, c), fac = fidelity(a, c);
      const double e = fab * fab + fbc * fbc - 1 - fac;
      excess = std::max(excess, e);
      violations += e > tol;
      root_excess = std::max(root_excess, fab + fbc - 1 - std::sqrt(fac));
      sym = std::max(sym, std::abs(fab - fidelity(b, a)));
      if (i % 10 == 0) {
        const Vector x = random_vector(d, rng), y = random_vector(d, rng);
        pure = std::max(pure, std::abs(fidelity(Matrix(x * x.adjoint()), Matrix(y * y.adjoint())) - std::norm(x.dot(y))));
      }
    }
    MetricRow tri{"fidelity.reverse-triangle.max-excess", excess, 0.0, 0.0, excess <= tol ? Verdict::Pass : Verdict::Fail,
                  "identity:fidelity-reverse-triangle"};
    rec.add(tri);
    rec.add(equality_row("fidelity.reverse-triangle.violations", static_cast<double>(violations), 0.0, 0.0,
                         "identity:fidelity-reverse-triangle", 0.0));
    MetricRow root{"fidelity.reverse-triangle-root.max-excess", root_excess, 0.0, 0.0,
                   root_excess <= tol ? Verdict::Pass : Verdict::Fail, "identity:fidelity-reverse-triangle"};
    rec.add(root);
    rec.add(detail::max_deviation_row("fidelity.pure-overlap", pure, "identity:fidelity-pure", tol));
    rec.add(detail::max_deviation_row("fidelity.symmetry", sym, "identity:fidelity-pure", tol));
    const Vector zero = basis_state(2, 0), plus = gates::H() * zero;
    rec.add(equality_row("fidelity.zero-plus", fidelity(Matrix(zero * zero.adjoint()), Matrix(plus * plus.adjoint())), 0.5, 0.0,
                         "identity:fidelity-pure", tol));
    rec.add(equality_row("fidelity.mixed-zero", fidelity(Matrix(gates::I(1) / 2.0), Matrix(zero * zero.adjoint())), 0.5, 0.0,
                         "oracle:fidelity-closed-form", tol));
  }

  {  // Gentle measurement.
    Rng rng = master.split("gentle");
    double excess = -1;
    std::int64_t checked = 0, high = 0;
    for (std::int64_t i = 0; i < cfg.get_int("gentle_pairs"); ++i) {
      const auto d = dims(rng);
      const int k = log2_exact(d);
      const MixedState rho(random_density(d, 1 + rng.below(d), rng), RegisterLayout{{"A", k}});
      const Matrix pi = random_projector(d, 1 + rng.below(d), rng);
      if ((pi * rho.matrix()).trace().real() <= 1e-6) continue;
      const auto g = gentle_post_state(rho, pi);
      ++checked;
      high += g.probability >= 0.5;
      excess = std::max(excess, trace_distance(rho, g.post) - std::sqrt(1 - g.probability));
    }
    rec.add({"gentle.max-excess", excess, 0.0, 0.0, excess <= tol ? Verdict::Pass : Verdict::Fail, "identity:gentle-measurement"});
    rec.add(info_row("gentle.checked-pairs", static_cast<double>(checked), "identity:gentle-measurement"));
    rec.add(info_row("gentle.pairs-with-p-at-least-half", static_cast<double>(high), "identity:gentle-measurement"));
  }

  {  // Trace distance: closed values and the best-projector oracle on qubits.
    Rng rng = master.split("trace-distance");
    const Vector zero = basis_state(2, 0), one = basis_state(2, 1), plus = gates::H() * zero;
    rec.add(equality_row("trace-distance.zero-one", trace_distance(Matrix(zero * zero.adjoint()), Matrix(one * one.adjoint())), 1.0, 0.0,
                         "identity:trace-distance", tol));
    rec.add(equality_row("trace-distance.zero-plus", trace_distance(Matrix(zero * zero.adjoint()), Matrix(plus * plus.adjoint())),
                         1 / std::sqrt(2.0), 0.0, "oracle:trace-distance-2x2", tol));
    double grid_dev = 0;
    const int steps = 60;
    for (int t = 0; t < 20; ++t) {
      const Matrix a = random_density(2, 2, rng), b = random_density(2, 2, rng);
      double best = 0;  // rank 0 and rank 2 give 0
      for (int i = 0; i <= steps; ++i)
        for (int j = 0; j < 2 * steps; ++j) {
          const double th = M_PI * i / steps, ph = M_PI * j / steps;
          const Vector v{{cplx(std::cos(th / 2)), std::polar(std::sin(th / 2), ph)}};
          best = std::max(best, (v.adjoint() * (a - b) * v)(0, 0).real());
        }
      grid_dev = std::max(grid_dev, trace_distance(a, b) - best);
    }
    // Grid step pi/60 bounds the shortfall by about (pi/60)^2.
    rec.add(equality_row("trace-distance.vs-projector-grid", grid_dev, 0.0, 0.0, "oracle:projector-grid", 3e-3));
  }

  {  // Partial trace of products; Haar first moment.
    Rng rng = master.split("haar");
    double pt = 0, unit = 0;
    for (int t = 0; t < 50; ++t) {
      const Matrix a = random_density(4, 2, rng), b = random_density(2, 2, rng);
      pt = std::max(pt, max_abs(kernel::reduce(kron(a, b), 3, {0, 1}) - a));
      const Matrix u = random_unitary(8, rng);
      unit = std::max(unit, max_abs(u.adjoint() * u - gates::I(3)));
    }
    rec.add(detail::max_deviation_row("partial-trace.product", pt, "identity:partial-trace", tol));
    rec.add(detail::max_deviation_row("haar.unitarity", unit, "identity:unitarity", tol));
    const std::size_t d = 4;
    const auto n = static_cast<std::size_t>(cfg.get_int("haar_samples"));
    double sum = 0;
    for (std::size_t i = 0; i < n; ++i) sum += std::norm(random_vector(d, rng)(0));
    const double var = 2.0 / (d * (d + 1.0)) - 1.0 / (d * d);
    rec.add(equality_row("haar.first-moment", sum / n, 1.0 / d, std::sqrt(var / n), "oracle:haar-moment", 0.0));
  }
  return rec;
}

// ---------------------------------------------------------------------------
// pqma: completeness, cheating families against the soundness bound, and the
// honest-verifier simulator.

inline PqmaInstance pqma_named(const std::string& name, const std::string& field) {
  try {
    return example_pqma_instance(name);
  } catch (const ConfigError&) {
    throw ConfigError("invalid config:\n  params." + field + ": unknown built-in instance '" + name + "'");
  }
}

inline ExperimentRecord run_pqma_experiment(const ExperimentConfig& cfg) {
  ExperimentRecord rec;
  const Rng master(cfg.seed);
  PqmaInstance no = pqma_named(cfg.get_text("instance"), "instance");
  PqmaInstance yes = pqma_named(cfg.get_text("yes_instance"), "yes_instance");
  if (!cfg.instance.is_null()) (cfg.instance.value("yes", true) ? yes : no) = pqma_instance_from_json(cfg.instance);
  if (yes.n() != no.n()) throw ConfigError("invalid config:\n  instance: yes and no instances differ in size");
  const PqmaParams prm{cfg.get_int("p"), cfg.get_int("q"), no.n()};
  prm.validate();
  const double bound = soundness_bound(static_cast<double>(prm.p), static_cast<double>(prm.q), prm.n);
  rec.add(info_row("soundness-bound", bound, "bound:pqma-soundness"));

  {  // Completeness on the yes instance.
    Rng rng = master.split("completeness");
    const auto in = PqmaProverInput::honest(prm, yes);
    const MixedState vcopy(yes.psi);
    const double exact = pqma_exact(prm, yes, in, vcopy).accept;
    rec.add(equality_row("completeness.exact", exact, yes.honest_acceptance(), 0.0, "identity:pqma-completeness", cfg.tol_exact));
    std::int64_t acc = 0;
    for (std::int64_t t = 0; t < cfg.trials; ++t) acc += run_pqma(prm, yes, in, vcopy, rng) == PqmaOutcome::Accept;
    const double rate = static_cast<double>(acc) / static_cast<double>(cfg.trials);
    rec.add(equality_row("completeness.sampled", rate, exact, binomial_sigma(exact, static_cast<std::size_t>(cfg.trials)),
                         "oracle:pqma-exact", cfg.tol_exact));
  }

  {  // Cheating families on the no instance.
    Rng rng = master.split("soundness");
    const auto cheat = cheat_harness(prm, no, cfg.get_text("family"), static_cast<std::size_t>(cfg.trials), rng);
    for (const auto& r : cheat.rows) rec.add(r);
  }

  {  // Simulator against the real view.
    Rng rng = master.split("simulator");
    const PqmaParams sp{cfg.get_int("sim_p"), cfg.get_int("sim_q"), yes.n()};
    sp.validate();
    double dist = 0;
    const int vq = static_cast<int>(sp.q) * yes.n();
    std::vector<PqmaVerifierInput> inputs{product_verifier_input(sp, yes.psi.density()), product_verifier_input(sp, no.psi.density())};
    for (std::int64_t i = 0; i < cfg.get_int("sim_inputs"); ++i)
      inputs.push_back({random_mixed_state(RegisterLayout{{"V", vq}, {"P", 1}}, rng).matrix(), 1});
    for (const auto& vin : inputs) {
      const auto sim = hv_simulate_pqma(sp, simulator_copies(yes, sp.q), vin, rng);
      dist = std::max(dist, trace_distance(sim.view.cq, pqma_real_view(sp, yes, vin).cq));
    }
    rec.add(detail::max_deviation_row("simulator.view-distance", dist, "oracle:pqma-real-view", cfg.tol_exact));
    rec.add(info_row("simulator.inputs", static_cast<double>(inputs.size()), "oracle:pqma-real-view"));
  }
  return rec;
}

// ---------------------------------------------------------------------------
// collapse: round-collapse compiler.

inline ExperimentRecord run_collapse(const ExperimentConfig& cfg) {
  ExperimentRecord rec;
  const Rng master(cfg.seed);
  const double tol = cfg.tol_exact;
  const auto inst = detail::protocol_instance(cfg);

  {  // Honest acceptance equals base completeness.
    Rng rng = master.split("honest");
    double dev = 0, sim_bell = 0, sim_fact = 0;
    std::vector<InteractiveProtocol> bases;
    if (inst && inst->honest) bases.push_back(*inst);
    for (std::int64_t i = 0; i < cfg.get_int("perfect_bases"); ++i)
      bases.push_back(random_perfect_base(rng, static_cast<int>(cfg.get_int("r")), 1, 1, 1));
    for (const auto& base : bases) {
      const auto cp = collapse_rounds(base);
      const double c = run_protocol(base, *base.honest);
      dev = std::max(dev, std::abs(run_protocol(cp.protocol, *cp.protocol.honest) - c));
      if (c < 1 - tol) continue;
      for (int i = 1; i < base.rounds(); ++i) {
        const auto t = hv_simulate_collapsed(cp, honest_stand_in(base), i);
        sim_bell = std::max(sim_bell, std::abs(1 - t.bell_check));
        sim_fact = std::max(sim_fact, t.factorization_residual);
      }
    }
    rec.add(detail::max_deviation_row("honest.acceptance-vs-base", dev, "identity:collapse-completeness", tol));
    rec.add(detail::max_deviation_row("simulator.bell-check", sim_bell, "oracle:collapsed-simulator", tol));
    rec.add(detail::max_deviation_row("simulator.factorization", sim_fact, "oracle:collapsed-simulator", tol));
  }

  {  // Branch-overlap identity p_i = 1/2 + 1/2 Re<psi0|psi1>.
    Rng rng = master.split("overlap");
    const auto base = random_base(rng, 2, 1, 1, 1);
    const auto cp = collapse_rounds(base);
    double dev = 0;
    std::int64_t used = 0;
    for (std::int64_t t = 0; t < cfg.get_int("overlap_samples"); ++t) {
      const auto o = collapsed_branch_overlap(cp, random_strategy(cp.protocol, cp.protocol.r_qubits, rng), 1);
      if (o.pass <= 1e-6) continue;
      ++used;
      dev = std::max(dev, std::abs(o.direct - o.formula));
    }
    rec.add(detail::max_deviation_row("branch-overlap.identity", dev, "identity:branch-overlap", tol));
    rec.add(info_row("branch-overlap.samples", static_cast<double>(used), "identity:branch-overlap"));
  }

  {  // Brute-force cheating value against the collapsed bound.
    Rng rng = master.split("soundness");
    const auto opt = detail::ascent_options(cfg);
    detail::WorstCase worst;
    double zeta_lo = 1, zeta_hi = 0;
    auto check = [&](const InteractiveProtocol& base, double zeta) {
      const auto cp = collapse_rounds(base);
      worst.add(brute_force_prover_value(cp.protocol, rng, opt).value, collapsed_soundness(zeta, base.rounds()));
      zeta_lo = std::min(zeta_lo, zeta), zeta_hi = std::max(zeta_hi, zeta);
    };
    if (inst && inst->rounds() == 2 && inst->coin_outcomes.empty()) check(*inst, detail::three_message_zeta(*inst, rng, opt));
    for (std::int64_t i = 0; i < cfg.get_int("bases"); ++i) {
      const auto base = random_sound_base(rng, rng.uniform(), 1, 1, 1);
      check(base, optimal_three_message_value(base.verifier_op(0, 0), base.verifier_op(1, 0), detail::verifier_input(base)));
    }
    rec.add(worst.row("soundness.worst-base", "bound:collapsed-soundness", cfg.tol_bound));
    rec.add(info_row("soundness.bases", static_cast<double>(worst.count), "bound:collapsed-soundness"));
    rec.add(info_row("soundness.zeta-min", zeta_lo, "bound:collapsed-soundness"));
    rec.add(info_row("soundness.zeta-max", zeta_hi, "bound:collapsed-soundness"));
  }

  {  // Sampled runs against exact acceptance.
    Rng rng = master.split("sampled");
    const auto base = random_perfect_base(rng, 2, 1, 1, 1);
    const auto cp = collapse_rounds(base);
    const auto cheat = random_strategy(cp.protocol, cp.protocol.r_qubits, rng);
    const std::int64_t n = std::min<std::int64_t>(cfg.trials, 2000);
    std::int64_t honest = 0, other = 0;
    for (std::int64_t t = 0; t < n; ++t) {
      honest += sample_run(cp.protocol, *cp.protocol.honest, {std::nullopt, std::nullopt}, rng).accepted;
      other += sample_run(cp.protocol, cheat, {std::nullopt, std::nullopt}, rng).accepted;
    }
    const double exact = run_protocol(cp.protocol, cheat);
    rec.add(equality_row("sampled.honest-accept-rate", static_cast<double>(honest) / n, 1.0, 0.0, "identity:collapse-completeness", 0.0));
    rec.add(equality_row("sampled.random-prover-accept-rate", static_cast<double>(other) / n, exact,
                         binomial_sigma(exact, static_cast<std::size_t>(n)), "oracle:exact-acceptance", 0.0));
  }
  return rec;
}

// ---------------------------------------------------------------------------
// public-coin: optimal 3-message value, public-coin compiler.

inline ExperimentRecord run_public_coin(const ExperimentConfig& cfg) {
  ExperimentRecord rec;
  const Rng master(cfg.seed);
  const double tol = cfg.tol_exact;
  const auto opt = detail::ascent_options(cfg);
  const auto inst = detail::protocol_instance(cfg);

  {  // Principal-angle value against alternating ascent; squared vs quartic.
    Rng rng = master.split("optimal");
    double squared = 0, quartic = 0;
    const auto maxw = static_cast<std::uint64_t>(cfg.get_int("max_w"));
    for (std::int64_t i = 0; i < cfg.get_int("verifiers"); ++i) {
      const int w = 1 + static_cast<int>(static_cast<std::uint64_t>(i) % maxw);
      const auto base = random_base(rng, 2, 1, w, 1, true);
      const double value = optimal_three_message_value(base.verifier_op(0, 0), base.verifier_op(1, 0), detail::verifier_input(base));
      const double ascent = brute_force_prover_value(base, rng, opt).value;
      squared = std::max(squared, std::abs(value - ascent));
      quartic = std::max(quartic, std::abs(value * value - ascent));
    }
    rec.add(detail::max_deviation_row("optimal-value.vs-ascent", squared, "oracle:alternating-ascent", cfg.tol_bound));
    rec.add(info_row("optimal-value.quartic-convention-deviation", quartic, "oracle:alternating-ascent"));
  }

  {  // Honest acceptance, including imperfect honest provers.
    Rng rng = master.split("honest");
    double worst = std::numeric_limits<double>::infinity();
    double perfect = 0;
    for (int i = 0; i < 5; ++i) {
      const auto base = random_perfect_base(rng, 2, 1, 1, 1);
      const auto cp = make_public_coin(base);
      perfect = std::max(perfect, std::abs(1 - run_protocol(cp.protocol, *cp.protocol.honest)));
      const auto other = random_base(rng, 2, 1, 1, 1);
      const auto s = random_strategy(other, 1, rng);
      const auto cq = make_public_coin(other);
      worst = std::min(worst, run_protocol(cq.protocol, public_coin_strategy(cq, s)) - run_protocol(other, s));
    }
    if (inst && inst->honest && inst->rounds() == 2) {
      const auto cp = make_public_coin(*inst);
      worst = std::min(worst, run_protocol(cp.protocol, *cp.protocol.honest) - run_protocol(*inst, *inst->honest));
    }
    rec.add(detail::max_deviation_row("honest.perfect-base", perfect, "identity:public-coin-completeness", tol));
    rec.add(lower_bound_row("honest.acceptance-minus-base", worst, 0.0, 0.0, "identity:public-coin-completeness", tol));
  }

  {  // Brute-force cheating value against 3/4 + sqrt(zeta)/2.
    Rng rng = master.split("soundness");
    detail::WorstCase worst;
    double reach = std::numeric_limits<double>::infinity();
    auto check = [&](const InteractiveProtocol& base, double zeta) {
      const auto cp = make_public_coin(base);
      const double v = brute_force_prover_value(cp.protocol, rng, opt).value;
      worst.add(v, public_coin_soundness(zeta));
      reach = std::min(reach, v - 0.5 * (1 + zeta));
    };
    if (inst && inst->rounds() == 2 && inst->coin_outcomes.empty()) check(*inst, detail::three_message_zeta(*inst, rng, opt));
    for (std::int64_t i = 0; i < cfg.get_int("bases"); ++i) {
      const auto base = random_sound_base(rng, 0.2 * rng.uniform(), 1, 1, 1);
      check(base, optimal_three_message_value(base.verifier_op(0, 0), base.verifier_op(1, 0), detail::verifier_input(base)));
    }
    rec.add(worst.row("soundness.worst-base", "bound:public-coin-soundness", cfg.tol_bound));
    // The prover answering b = 1 honestly and b = 0 optimally reaches (1 + zeta)/2.
    rec.add(lower_bound_row("soundness.ascent-reaches-trivial-strategy", reach, 0.0, 0.0, "oracle:alternating-ascent", 1e-4));
  }

  {  // Honest-verifier simulator.
    Rng rng = master.split("simulator");
    double accept = 0, view = 0;
    for (int i = 0; i < 5; ++i) {
      const auto base = (i == 0 && inst && inst->honest && inst->rounds() == 2) ? *inst : random_perfect_base(rng, 2, 1, 1, 1);
      const auto cp = make_public_coin(base);
      const auto sim = hv_simulate_public_coin(cp, honest_stand_in(base));
      const auto real = public_coin_real_view(cp, *cp.protocol.honest);
      accept = std::max({accept, std::abs(1 - sim.view.accept[0]), std::abs(1 - sim.view.accept[1])});
      view = std::max(view, trace_distance(real.stored, sim.view.stored));
      for (int b = 0; b < 2; ++b) view = std::max(view, trace_distance(real.reply[b], sim.view.reply[b]));
    }
    rec.add(detail::max_deviation_row("simulator.acceptance", accept, "oracle:public-coin-simulator", tol));
    rec.add(detail::max_deviation_row("simulator.view-distance", view, "oracle:public-coin-real-view", tol));
  }
  return rec;
}

// ---------------------------------------------------------------------------
// zk: coin-flip compiler against malicious verifiers.

inline std::vector<MaliciousVerifier> malicious_verifier_suite() {
  return {MaliciousVerifier{},
          MaliciousVerifier{"fixed-zero", 0.0, {}},
          MaliciousVerifier{"fixed-one", 1.0, {}},
          MaliciousVerifier{"abort-first-on-one", 0.5, {{0.0, 1.0}, {0.0, 0.0}}},
          MaliciousVerifier{"abort-second", 0.2, {{0.0, 0.0}, {0.3, 0.8}, {0.0, 0.0}}},
          MaliciousVerifier{"always-abort", 0.7, {{1.0, 1.0}}}};
}

inline ExperimentRecord run_zk(const ExperimentConfig& cfg) {
  ExperimentRecord rec;
  const Rng master(cfg.seed);
  const int ell = static_cast<int>(cfg.get_int("ell"));
  Rng base_rng = master.split("base");
  const auto inst = detail::protocol_instance(cfg);
  if (inst && !inst->honest) throw ConfigError("invalid config:\n  instance: zk needs a base with an honest prover");
  const auto base = inst ? *inst : random_perfect_base(base_rng, 2, 1, 1, 1);
  const auto cp = make_malicious_zk(base, ell);

  {  // Coin marginal against biased corrupted provers.
    Rng rng = master.split("coins");
    const double pmin = cfg.get_real("chi_p_min");
    for (double bias : cfg.get_reals("biases")) {
      const auto q = xor_coin_distribution(bias, 0.5);
      rec.add(equality_row("coin.exact[bias=" + detail::fmt(bias) + "]", q[1], 0.5, 0.0, "identity:xor-coin", cfg.tol_exact));
      const auto st = run_malicious_zk(cp, *cp.protocol.honest, cfg.trials, rng, bias);
      rec.add(lower_bound_row("coin.chi-square-p[bias=" + detail::fmt(bias) + "]", st.p_value, pmin, 0.0, "oracle:chi-square", 0.0));
      // Perfectly complete bases accept every run, whatever the coins.
      if (run_protocol(base, *base.honest) >= 1 - cfg.tol_exact)
        rec.add(equality_row("honest.accept-rate[bias=" + detail::fmt(bias) + "]", static_cast<double>(st.accepted) / st.trials, 1.0,
                             0.0, "identity:public-coin-completeness", cfg.tol_exact));
    }
  }

  {  // Simulated view against the real view, including abort paths.
    Rng rng = master.split("views");
    const auto sim = honest_stand_in(base, ell);
    double dist = 0, abort_mass = 0;
    for (const auto& v : malicious_verifier_suite()) {
      const auto real = real_malicious_view(cp, *cp.protocol.honest, v);
      const auto fake = zk_simulated_view(cp, sim, v);
      dist = std::max(dist, view_distance(real, fake));
      for (std::size_t a = 0; a + 1 < real.blocks.size(); ++a) abort_mass += real.probability(a);
    }
    rec.add(detail::max_deviation_row("simulator.view-distance", dist, "oracle:malicious-real-view", cfg.tol_exact));
    rec.add(info_row("simulator.abort-mass", abort_mass, "oracle:malicious-real-view"));
    // Sampled abort points of the real and simulated interactions.
    const MaliciousVerifier v = malicious_verifier_suite()[4];
    const auto exact = real_malicious_view(cp, *cp.protocol.honest, v);
    const std::int64_t n = cfg.trials;
    std::vector<std::int64_t> real_at(ell + 1), sim_at(ell + 1);
    for (std::int64_t t = 0; t < n; ++t) {
      ++real_at[sample_malicious_real(cp, v, rng).abort_at];
      ++sim_at[zk_simulate_malicious(cp, sim, v, rng).abort_at];
    }
    for (int a = 0; a <= ell; ++a) {
      const double p = exact.probability(static_cast<std::size_t>(a));
      const double s = binomial_sigma(p, static_cast<std::size_t>(n));
      rec.add(equality_row("sampled.real-abort-at[" + std::to_string(a) + "]", static_cast<double>(real_at[a]) / n, p, s,
                           "oracle:malicious-real-view", 0.0));
      rec.add(equality_row("sampled.sim-abort-at[" + std::to_string(a) + "]", static_cast<double>(sim_at[a]) / n, p, s,
                           "oracle:malicious-real-view", 0.0));
    }
  }

  {  // Sequential product law for independent cheating provers.
    Rng rng = master.split("product");
    const auto other = random_base(rng, 2, 1, base.w_qubits, base.m_qubits);
    const auto cq = make_malicious_zk(other, ell);
    const auto s = public_coin_strategy(cq, random_strategy(other, 1, rng));
    const auto a = public_coin_branch_values(cq, s);
    const double per = 0.5 * (a[0] + a[1]);
    const double p = std::pow(per, ell);
    rec.add(equality_row("product-law.exact", malicious_zk_acceptance(cq, s), p, 0.0, "identity:sequential-product", cfg.tol_exact));
    const auto st = run_malicious_zk(cq, s, cfg.trials, rng);
    rec.add(equality_row("product-law.sampled", static_cast<double>(st.accepted) / st.trials, p,
                         binomial_sigma(p, static_cast<std::size_t>(st.trials)), "identity:sequential-product", 0.0));
  }
  return rec;
}

// ---------------------------------------------------------------------------
// double-open: binding game.

inline ExperimentRecord run_double_open_experiment(const ExperimentConfig& cfg) {
  ExperimentRecord rec;
  const Rng master(cfg.seed);
  const auto scheme = cfg.instance.is_null() ? commitment_by_name(cfg.get_text("scheme")) : commitment_from_json(cfg.instance);
  const auto broken = commitment_by_name(cfg.get_text("broken_scheme"));
  const auto n = static_cast<std::size_t>(cfg.trials);
  // Win rate over non-aborted runs, with the number of such runs.
  auto sampled = [&](const CanonicalCommitment& c, const DoubleOpenAdversary& a, Rng& rng) {
    std::size_t wins = 0, done = 0;
    for (std::size_t t = 0; t < n; ++t) {
      const auto r = run_double_open(c, a, rng);
      if (!r.aborted) ++done, wins += r.win;
    }
    return std::pair<double, std::size_t>{done ? static_cast<double>(wins) / static_cast<double>(done) : 0.0, done};
  };

  {  // Coin-guessing adversary: 1/2 of the completed runs.
    Rng rng = master.split("honest");
    const auto a = coin_guesser(scheme);
    rec.add(equality_row("coin-guesser.exact[" + scheme.name + "]", double_open_exact(scheme, a).conditional_win(), 0.5, 0.0,
                         "oracle:double-open-exact", cfg.tol_exact));
    const auto [rate, done] = sampled(scheme, a, rng);
    rec.add(equality_row("coin-guesser.sampled[" + scheme.name + "]", rate, 0.5, binomial_sigma(0.5, done), "oracle:fair-coin", 0.0));
  }

  {  // Broken scheme: the X attack wins.
    Rng rng = master.split("broken");
    const auto a = x_attack(broken);
    const double exact = double_open_exact(broken, a).conditional_win();
    const auto [rate, done] = sampled(broken, a, rng);
    rec.add(equality_row("x-attack.sampled[" + broken.name + "]", rate, exact, binomial_sigma(exact, done), "oracle:double-open-exact", 0.0));
    rec.add(lower_bound_row("x-attack.breaks[" + broken.name + "]", rate, cfg.get_real("broken_threshold"), 0.0, "oracle:double-open-exact",
                            0.0));
  }

  {  // The binding scheme against the X attack and random adversaries.
    Rng rng = master.split("random");
    const auto x = double_open_exact(scheme, x_attack(scheme));
    rec.add(info_row("x-attack.conditional-win[" + scheme.name + "]", x.conditional_win(), "oracle:double-open-exact"));
    double best = 0;
    for (std::int64_t i = 0; i < cfg.get_int("random_adversaries"); ++i)
      best = std::max(best, double_open_exact(scheme, random_adversary(scheme, rng)).conditional_win());
    rec.add(info_row("random.best-conditional-win[" + scheme.name + "]", best, "oracle:double-open-exact"));
  }
  return rec;
}

// ---------------------------------------------------------------------------
// mac: toy trap code.

inline ExperimentRecord run_mac_experiment(const ExperimentConfig& cfg) {
  detail::no_instance(cfg);
  ExperimentRecord rec;
  const Rng master(cfg.seed);
  QuantumMac mac;
  mac.t = static_cast<int>(cfg.get_int("t"));
  const int wire = static_cast<int>(cfg.get_int("attack_wire"));
  if (wire >= mac.width()) throw ConfigError("invalid config:\n  params.attack_wire: must be below m + t = " + std::to_string(mac.width()));
  Rng rng = master.split("mac");
  const auto msg = random_mixed_state(RegisterLayout{{"M", mac.m}}, rng);
  Matrix accept_flag = Matrix::Zero(2, 2);
  accept_flag(1, 1) = 1;
  const Matrix want = kron(msg.matrix(), accept_flag);
  double worst = 0;
  for (std::size_t i = 0; i < mac.key_count(); ++i) {
    const auto k = mac.key(i);
    worst = std::max(worst, max_abs(mac_decode(mac, k, mac_encode(mac, k, msg)).matrix() - want));
  }
  rec.add(detail::max_deviation_row("round-trip.all-keys", worst, "identity:mac-round-trip", cfg.tol_exact));
  rec.add(info_row("round-trip.keys", static_cast<double>(mac.key_count()), "identity:mac-round-trip"));

  const Matrix x = kernel::embed(gates::X(), mac.width(), {wire});
  const double oracle = static_cast<double>(mac.t) / mac.width();  // X lands on a trap
  const double exact = mac_detection_probability(mac, x, msg.matrix(), 0);
  rec.add(equality_row("x-attack.detection", exact, oracle, 0.0, "oracle:trap-placement", cfg.tol_exact));
  rec.add(equality_row("identity-attack.detection", mac_detection_probability(mac, gates::I(mac.width()), msg.matrix(), 0), 0.0, 0.0,
                       "identity:mac-round-trip", cfg.tol_exact));

  // Sampled keys.
  std::int64_t detected = 0;
  for (std::int64_t t = 0; t < cfg.trials; ++t) {
    const auto k = mac.key(rng.below(mac.key_count()));
    const auto code = mac_encode(mac, k, msg);
    const MixedState hit(x * code.matrix() * x.adjoint(), code.layout());
    const Matrix out = mac_decode(mac, k, hit).matrix();
    double rej = 0;
    for (Eigen::Index i = 0; i < out.rows(); i += 2) rej += out(i, i).real();
    detected += rej > 0.5;
  }
  rec.add(equality_row("x-attack.detection-sampled", static_cast<double>(detected) / cfg.trials, oracle,
                       binomial_sigma(oracle, static_cast<std::size_t>(cfg.trials)), "oracle:trap-placement", 0.0));

  // Real against ideal with a reference qubit.
  const Matrix rho_mr = random_density(pow2(mac.m + 1), pow2(mac.m + 1), rng);
  rec.add(detail::max_deviation_row("real-vs-ideal.identity-attack",
                                    mac_real_vs_ideal(mac, gates::I(mac.width() + 1), rho_mr, 1, natural_mac_simulator(1.0, 1)),
                                    "oracle:mac-ideal", cfg.tol_exact));
  return rec;
}

// ---------------------------------------------------------------------------
// uhlmann: transformation, soundness, single-query simulator.

inline ExperimentRecord run_uhlmann_experiment(const ExperimentConfig& cfg) {
  ExperimentRecord rec;
  const Rng master(cfg.seed);
  const int rq = static_cast<int>(cfg.get_int("r_qubits")), sq = static_cast<int>(cfg.get_int("s_qubits"));
  const double delta = cfg.get_real("delta");
  const int gamma = static_cast<int>(cfg.get_int("gamma"));
  const bool enforce = cfg.get_bool("enforce_gamma");

  {  // Residual of the computed transformation.
    Rng rng = master.split("residual");
    double residual = 0, unit = 0;
    for (std::int64_t i = 0; i < cfg.get_int("instances"); ++i) {
      const auto inst = random_uhlmann_instance(rng, rq, sq);
      const auto u = compute_uhlmann(inst);
      residual = std::max(residual, u.residual);
      unit = std::max(unit, max_abs(u.u.adjoint() * u.u - gates::I(sq)));
    }
    rec.add(detail::max_deviation_row("transformation.residual", residual, "identity:uhlmann", cfg.tol_exact));
    rec.add(detail::max_deviation_row("transformation.unitarity", unit, "identity:unitarity", cfg.tol_exact));
  }

  Rng irng = master.split("instance");
  UhlmannInstance inst = cfg.instance.is_null() ? random_uhlmann_instance(irng, rq, sq) : uhlmann_instance_from_json(cfg.instance);
  inst.delta = delta;
  inst.gamma = gamma;
  inst.validate(enforce);
  const auto u = compute_uhlmann(inst);
  const MixedState target(PureState(inst.c_state(), inst.layout()));
  const MixedState ideal(PureState(inst.d_state(), inst.layout()));

  {  // Honest prover: accepts, output exact.
    Rng rng = master.split("honest");
    const auto p = honest_uhlmann_prover(u);
    const auto ex = uhlmann_exact(inst, p, target);
    rec.add(equality_row("honest.acceptance", ex.accept, 1.0, 0.0, "identity:uhlmann-completeness", cfg.tol_exact));
    rec.add(detail::max_deviation_row("honest.output-distance", trace_distance(*ex.conditioned, ideal), "identity:uhlmann-completeness",
                                      cfg.tol_exact));
    for (const auto& r : soundness_check(inst, p, cfg.trials, rng).rows) rec.add(r);
  }

  {  // Perturbed and identity provers against 1/delta.
    Rng rng = master.split("perturbed");
    for (const auto& r : soundness_check(inst, perturbed_uhlmann_prover(inst, u, cfg.get_real("eps")), cfg.trials, rng).rows) rec.add(r);
    for (const auto& r : soundness_check(inst, identity_uhlmann_prover(inst), std::min<std::int64_t>(cfg.trials, 1000), rng).rows)
      rec.add(r);
  }

  {  // Prover switching to garbage at one round: recorded, not asserted.
    const auto p = switching_uhlmann_prover(u, inst.gamma / 2, gates::I(inst.s_qubits));
    const auto ex = uhlmann_exact(inst, p, target);
    rec.add(info_row("switching.acceptance", ex.accept, "oracle:uhlmann-exact"));
    rec.add(info_row("switching.output-distance", ex.conditioned ? trace_distance(*ex.conditioned, ideal) : 0.0, "oracle:uhlmann-exact"));
  }

  {  // Single-query simulator.
    Rng rng = master.split("simulator");
    double dist = 0, calls = 0;
    const std::vector<UhlmannVerifier> verifiers{{"honest", target, 1 + inst.gamma / 3},
                                                 {"mixed-T", MixedState::maximally_mixed(inst.layout()), 1},
                                                 {"random-T", random_mixed_state(inst.layout(), rng), inst.gamma}};
    for (const auto& v : verifiers) {
      UhlmannOracle oracle(u.u, 1);
      const auto sim = zk_simulate_uhlmann(inst, oracle, v, rng);
      calls = std::max(calls, std::abs(sim.oracle_calls - 1.0));
      dist = std::max(dist, view_distance(sim.view, real_uhlmann_view(inst, u, v)));
    }
    rec.add(equality_row("simulator.oracle-calls-minus-one", calls, 0.0, 0.0, "identity:single-query", 0.0));
    rec.add(detail::max_deviation_row("simulator.view-distance", dist, "oracle:uhlmann-real-view", cfg.tol_exact));
  }
  return rec;
}

// ---------------------------------------------------------------------------
// pipeline: collapse -> repeat -> public coin -> coin flip on one base.

inline ExperimentRecord run_pipeline(const ExperimentConfig& cfg) {
  ExperimentRecord rec;
  const Rng master(cfg.seed);
  const auto opt = detail::ascent_options(cfg);
  const int r = static_cast<int>(cfg.get_int("r")), k = static_cast<int>(cfg.get_int("k")), ell = static_cast<int>(cfg.get_int("ell"));
  Rng rng = master.split("base");
  const auto inst = detail::protocol_instance(cfg);
  const auto base = inst ? *inst : random_sound_base(rng, 0.1 + 0.1 * rng.uniform(), 1, 1, 1, "pipeline-base");
  const double zeta = detail::three_message_zeta(base, rng, opt);
  rec.add(info_row("base.zeta", zeta, "oracle:alternating-ascent"));

  {  // Formula spot values.
    const double z = cfg.get_real("spot_zeta");
    const int sk = static_cast<int>(cfg.get_int("spot_k"));
    rec.add(equality_row("formula.repeated-spot", repeated_soundness(z, sk), std::pow(z, sk), 0.0, "bound:repeated-soundness", 0.0));
    rec.add(equality_row("formula.repeated-half-ten", repeated_soundness(0.5, 10), std::ldexp(1.0, -10), 0.0, "bound:repeated-soundness", 0.0));
    rec.add(equality_row("formula.collapsed-zero", collapsed_soundness(0, 2), 15.0 / 16, 0.0, "bound:collapsed-soundness", 0.0));
    rec.add(equality_row("formula.public-coin-zero", public_coin_soundness(0), 0.75, 0.0, "bound:public-coin-soundness", 0.0));
  }

  // Stage II.
  Rng srng = master.split("stages");
  const double bound2 = collapsed_soundness(zeta, r);
  const double v2 = brute_force_prover_value(collapse_rounds(base).protocol, srng, opt).value;
  rec.add(upper_bound_row("stage-collapse.cheat", v2, bound2, 0.0, "bound:collapsed-soundness", cfg.tol_bound));

  // Parallel repetition of the base: optimum is the k-th power.
  const auto rep = parallel_repeat(base, k);
  const auto single = brute_force_prover_value(base, srng, opt);
  const double vk = brute_force_prover_value(rep.protocol, srng, opt).value;
  rec.add(equality_row("stage-repeat.optimum", vk, std::pow(zeta, k), 0.0, "bound:repeated-soundness", cfg.tol_bound));
  rec.add(equality_row("stage-repeat.product-prover", run_protocol(rep.protocol, product_strategy(rep, {single.best})),
                       std::pow(single.value, k), 0.0, "identity:product-prover", cfg.tol_exact));

  // Stage III on the base (the collapsed, repeated protocol exceeds the cap).
  const auto pc = make_public_coin(base);
  const auto best3 = brute_force_prover_value(pc.protocol, srng, opt);
  rec.add(upper_bound_row("stage-public-coin.cheat", best3.value, public_coin_soundness(zeta), 0.0, "bound:public-coin-soundness",
                          cfg.tol_bound));
  const double composite = pipeline_soundness(zeta, r, k);
  rec.add(upper_bound_row("composite.cheat", std::max({v2, vk, best3.value}), composite, 0.0, "bound:pipeline-soundness", cfg.tol_bound));

  // Stage IV with the best stage III prover.
  const auto mz = make_malicious_zk(base, ell);
  const double exact4 = malicious_zk_acceptance(mz, best3.best);
  const double bound4 = std::pow(public_coin_soundness(zeta), ell);
  rec.add(upper_bound_row("stage-coin-flip.cheat", exact4, bound4, 0.0, "bound:coin-flip-soundness", cfg.tol_bound));
  Rng mrng = master.split("sampled");
  const auto st = run_malicious_zk(mz, best3.best, cfg.trials, mrng);
  const double rate = static_cast<double>(st.accepted) / st.trials;
  const double sig = binomial_sigma(exact4, static_cast<std::size_t>(st.trials));
  rec.add(equality_row("stage-coin-flip.sampled", rate, exact4, sig, "oracle:malicious-exact", 0.0));
  rec.add(upper_bound_row("composite.sampled-cheat", rate, composite, sig, "bound:pipeline-soundness", 0.0));
  return rec;
}

// ---------------------------------------------------------------------------

/// Validates the config, runs the experiment, stamps config echo and time.
inline ExperimentRecord run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  ExperimentRecord rec;
  if (cfg.kind == "core-check") rec = run_core_check(cfg);
  else if (cfg.kind == "pqma") rec = run_pqma_experiment(cfg);
  else if (cfg.kind == "collapse") rec = run_collapse(cfg);
  else if (cfg.kind == "public-coin") rec = run_public_coin(cfg);
  else if (cfg.kind == "zk") rec = run_zk(cfg);
  else if (cfg.kind == "double-open") rec = run_double_open_experiment(cfg);
  else if (cfg.kind == "mac") rec = run_mac_experiment(cfg);
  else if (cfg.kind == "uhlmann") rec = run_uhlmann_experiment(cfg);
  else if (cfg.kind == "pipeline") rec = run_pipeline(cfg);
  else throw ConfigError("invalid config:\n  kind: unknown experiment kind '" + cfg.kind + "'");
  rec.experiment = cfg.kind;
  rec.config = cfg.echo();
  rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rec;
}

}  // namespace qzk
