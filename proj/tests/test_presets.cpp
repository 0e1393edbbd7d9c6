#include <doctest.h>

#include <cmath>

#include "taxis/errors.hpp"
#include "taxis/presets.hpp"

using namespace taxis;

TEST_CASE("preset catalogue") {
  const auto names = preset_names();
  CHECK(names.size() == 5);
  for (const char* n : {"thm1-core", "thm1-subquadratic-g", "allee", "thm2-decay", "gate-fail-alpha"})
    CHECK(std::find(names.begin(), names.end(), n) != names.end());
  CHECK_THROWS_AS(preset("nope"), StructuralError);
}

TEST_CASE("every preset validates and meets its gate expectations") {
  for (const std::string& name : preset_names()) {
    const Preset p = preset(name);
    INFO(name);
    CHECK(p.name == name);
    CHECK_FALSE(p.description.empty());
    CHECK_NOTHROW(validate_config(p.config));
    const GateOutcome gates = evaluate_gates(p.config);
    CHECK(gates.gate1.pass == p.expect_gate1);
    CHECK(gates.gate2.pass == p.expect_gate2);
    CHECK(p.decay_armed == p.expect_gate2);
    CHECK(p.config.out_dir == "runs/" + name);
  }
}

TEST_CASE("gate-fail-alpha fails on alpha") {
  const GateOutcome g = evaluate_gates(preset("gate-fail-alpha").config);
  CHECK_FALSE(g.gate1.pass);
  CHECK_FALSE(g.gate1.alpha_ok);
  CHECK(g.gate1.alpha_margin < 0.0);
}

TEST_CASE("subquadratic exploiter growth passes through the min condition") {
  const Config c = preset("thm1-subquadratic-g").config;
  const KineticSpec kin = make_kinetics(c);
  CHECK(kin.beta() < 2.0);
  const double threshold = (kin.alpha() + 1.0) / (kin.alpha() - 1.0);
  CHECK(threshold == doctest::Approx(1.4));
  CHECK(kin.beta() == doctest::Approx(1.8));
  CHECK(evaluate_gates(c).gate1.min_cond_margin == doctest::Approx(0.4));
}

TEST_CASE("decaying resupply has a finite time integral") {
  const Config c = preset("thm2-decay").config;
  const ResupplySpec r = make_resupply(c);
  CHECK(r.r_double_star(c.lx, c.ly) == doctest::Approx(0.5));
  double sum = 0.0;
  const double dt = 1e-3;
  for (int k = 0; k < 60000; ++k)
    sum += 0.5 * dt * (r.sup_at(k * dt, c.lx, c.ly) + r.sup_at((k + 1) * dt, c.lx, c.ly));
  CHECK(sum == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(c.mu > 0.0);
}

TEST_CASE("allee preset uses the shipped envelope") {
  const KineticSpec kin = make_kinetics(preset("allee").config);
  CHECK(std::holds_alternative<Allee>(kin.law_f));
  CHECK(validate_envelope(kin).holds);
}
