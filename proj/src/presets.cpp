#include "taxis/presets.hpp"

#include "taxis/errors.hpp"

namespace taxis {

namespace {

InitialRecipe gaussian(double cx, double cy, double width, double amplitude, double floor) {
  InitialRecipe r;
  r.kind = "gaussian";
  r.cx = cx;
  r.cy = cy;
  r.width = width;
  r.amplitude = amplitude;
  r.floor = floor;
  return r;
}

LawConfig power(double exponent) {
  LawConfig l;
  l.law = "power";
  l.K = 1.0;
  l.L = 1.0;
  l.exponent = exponent;
  return l;
}

Config base(const std::string& name) {
  Config c;
  c.nx = c.ny = 32;
  c.lx = c.ly = 1.0;
  c.t_end = 20.0;
  c.dt_max = 5e-3;
  c.safety = 0.2;
  c.mu = 0.0;
  c.epsilon = 1e-3;
  c.f = power(3.0);
  c.g = power(3.0);
  c.profile = "constant";
  c.r_amplitude = 0.1;
  c.u0 = gaussian(0.35, 0.4, 0.2, 1.5, 0.2);
  c.v0 = gaussian(0.65, 0.6, 0.25, 1.0, 0.3);
  c.w0 = gaussian(0.5, 0.5, 0.3, 1.0, 0.2);
  c.cadence = 10;
  c.delta = 1e-2;
  c.q = 2.0;
  c.out_dir = "runs/" + name;
  c.snapshot_every = 100;
  return c;
}

} // namespace

std::vector<std::string> preset_names() {
  return {"thm1-core", "thm1-subquadratic-g", "allee", "thm2-decay", "gate-fail-alpha"};
}

Preset preset(const std::string& name) {
  Preset p;
  p.name = name;
  p.config = base(name);
  Config& c = p.config;
  if (name == "thm1-core") {
    p.description = "alpha = beta = 3, no decay, constant resupply";
  } else if (name == "thm1-subquadratic-g") {
    p.description = "alpha = 6 with subquadratic exploiter degradation beta = 1.8";
    c.f = power(6.0);
    c.g = power(1.8);
    c.t_end = 10.0;
  } else if (name == "allee") {
    p.description = "Allee-type forager growth s(1-s)(s-2), beta = 3";
    c.f = LawConfig{};
    c.f.law = "allee";
    c.f.exponent = 3.0;
  } else if (name == "thm2-decay") {
    p.description = "decaying resupply with mu > 0: nutrient decay and eventual regularity";
    c.mu = 0.5;
    c.epsilon = 0.0;
    c.profile = "gaussian";
    c.r_amplitude = 0.5;
    c.r_cx = c.r_cy = 0.5;
    c.r_width = 0.2;
    c.r_decay = 1.0;
    c.t_end = 40.0;
    p.expect_gate2 = true;
    p.decay_armed = true;
  } else if (name == "gate-fail-alpha") {
    p.description = "alpha = 2.2 below the admissibility threshold";
    c.f = power(2.2);
    p.expect_gate1 = false;
  } else {
    throw StructuralError("unknown preset '" + name + "'");
  }
  return p;
}

GateOutcome evaluate_gates(const Config& c) {
  const KineticSpec kin = make_kinetics(c);
  return {check_theorem1(kin), check_theorem2(kin, c.mu, make_resupply(c), c.lx, c.ly)};
}

} // namespace taxis
