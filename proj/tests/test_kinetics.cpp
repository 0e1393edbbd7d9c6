#include <doctest.h>

#include <cmath>
#include <limits>

#include "taxis/errors.hpp"
#include "taxis/kinetics.hpp"

using namespace taxis;

namespace {

const double kGateAlpha = 1.0 + std::sqrt(2.0);

// Worst margin of both envelope inequalities on a dense uniform scan.
double dense_envelope_margin(const GrowthLaw& law, const Envelope& e, double s_max, int n) {
  double worst = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= n; ++k) {
    const double s = s_max * k / n;
    const double v = eval_law(law, s);
    const double sp = std::pow(s, e.exponent);
    worst = std::min(worst, (-e.K * sp + e.L) - v);
    worst = std::min(worst, v - (-e.k * sp - e.l));
  }
  return worst;
}

KineticSpec power_spec(double alpha, double beta) {
  return KineticSpec::with_defaults(PurePower{1.0, 1.0, alpha}, PurePower{1.0, 1.0, beta});
}

} // namespace

TEST_CASE("law evaluation") {
  CHECK(eval_law(PurePower{1.0, 1.0, 3.0}, 1.0) == 0.0);
  CHECK(eval_law(PurePower{2.0, 0.5, 2.0}, 3.0) == doctest::Approx(0.5 - 18.0));
  CHECK(eval_law(Allee{}, 0.0) == 0.0);
  CHECK(eval_law(Allee{}, 1.0) == 0.0);
  CHECK(eval_law(Allee{}, 2.0) == 0.0);
  CHECK(eval_law(Allee{}, 3.0) == -6.0);
  CHECK(eval_law(Logistic{2.0, 1.0, 2.0}, 2.0) == doctest::Approx(0.0));
  CHECK(law_name(Allee{}) == "allee");
}

TEST_CASE("eval_f and eval_g reject negative densities") {
  const KineticSpec spec = power_spec(3.0, 3.0);
  CHECK_THROWS_AS(eval_f(spec, -1e-3), DomainError);
  CHECK_THROWS_AS(eval_g(spec, -1e-3), DomainError);
  CHECK(eval_f(spec, 0.0) == 1.0);
}

TEST_CASE("pure power envelope is tight from above") {
  const KineticSpec spec = KineticSpec::with_defaults(PurePower{1.5, 2.0, 3.0}, PurePower{1.0, 1.0, 4.0});
  const EnvelopeReport rep = validate_envelope(spec);
  CHECK(rep.holds);
  CHECK(std::abs(rep.worst_upper_f) < 1e-9);
  CHECK(rep.worst_lower_f >= 0.0);
}

TEST_CASE("shipped Allee envelope holds on a dense scan") {
  const Envelope e = default_envelope(Allee{});
  CHECK(e.K == 0.5);
  CHECK(e.L == 9.0);
  CHECK(e.exponent == 3.0);
  CHECK(dense_envelope_margin(Allee{}, e, 50.0, 500000) > 0.0);
  const KineticSpec spec = KineticSpec::with_defaults(Allee{}, PurePower{});
  CHECK(validate_envelope(spec).holds);
  CHECK(structural_issues(spec).empty());
}

TEST_CASE("Allee envelope with L = 3 is too tight") {
  KineticSpec spec = KineticSpec::with_defaults(Allee{}, PurePower{});
  spec.env_f = Envelope{0.5, 3.0, 2.0, 3.0, 3.0};
  CHECK(dense_envelope_margin(Allee{}, spec.env_f, 50.0, 50000) < 0.0);
  const EnvelopeReport rep = validate_envelope(spec);
  CHECK_FALSE(rep.holds);
  CHECK(rep.worst_label == "upper f");
}

TEST_CASE("a declared exponent below the true one fails") {
  KineticSpec spec = power_spec(4.0, 3.0);
  spec.env_f.exponent = 3.0;
  CHECK_FALSE(validate_envelope(spec).holds);
}

TEST_CASE("logistic default envelope holds") {
  const Logistic law{2.0, 1.0, 3.0};
  const Envelope e = default_envelope(law);
  CHECK(dense_envelope_margin(law, e, 20.0, 200000) > -1e-12);
  CHECK(validate_envelope(KineticSpec::with_defaults(law, law)).holds);
}

TEST_CASE("custom laws need explicit envelopes") {
  CHECK_THROWS_AS(default_envelope(CustomLaw{"zero", [](double) { return 0.0; }}), StructuralError);
}

TEST_CASE("structural issues") {
  KineticSpec spec = power_spec(3.0, 3.0);
  CHECK(structural_issues(spec).empty());
  spec.law_f = PurePower{1.0, -0.5, 3.0};
  spec.env_f.L = -0.5;
  const auto issues = structural_issues(spec);
  CHECK(issues.size() == 2);
  spec = power_spec(3.0, 3.0);
  spec.env_g.exponent = 1.0;
  CHECK_FALSE(structural_issues(spec).empty());
}

TEST_CASE("first gate") {
  CHECK(check_theorem1(power_spec(4.0, 2.0)).pass);
  CHECK_FALSE(check_theorem1(power_spec(2.5, 2.0)).pass);
  CHECK_FALSE(check_theorem1(power_spec(2.5, 2.0)).min_cond_ok);
  CHECK_FALSE(check_theorem1(power_spec(2.4, 5.0)).alpha_ok);
  CHECK(check_theorem1(power_spec(3.0, 3.0)).pass);
  // min(3, 1.8) = 1.8 < (3+1)/(3-1) = 2
  const GateResult r = check_theorem1(power_spec(3.0, 1.8));
  CHECK_FALSE(r.pass);
  CHECK(r.alpha_ok);
  CHECK_FALSE(r.min_cond_ok);
  CHECK(r.min_cond_margin == doctest::Approx(-0.2));
  // alpha = 6: (7/5) = 1.4 < 1.8
  CHECK(check_theorem1(power_spec(6.0, 1.8)).pass);
}

TEST_CASE("first gate is monotone in beta") {
  for (double alpha : {2.5, 3.0, 4.0, 6.0}) {
    bool seen_pass = false;
    for (double beta = 1.05; beta < 8.0; beta += 0.05) {
      const bool pass = check_theorem1(power_spec(alpha, beta)).pass;
      if (seen_pass) CHECK(pass);
      seen_pass = seen_pass || pass;
    }
  }
}

TEST_CASE("gate knife edge") {
  const GateResult r = check_theorem1(power_spec(kGateAlpha + 1e-12, 5.0));
  CHECK(r.knife_edge);
  CHECK(r.alpha_ok);
  CHECK_FALSE(check_theorem1(power_spec(kGateAlpha, 5.0)).alpha_ok);
}

TEST_CASE("second gate") {
  ResupplySpec decaying;
  decaying.profile = ConstantProfile{0.2};
  decaying.decay_lambda = 1.0;
  CHECK(check_theorem2(power_spec(3.0, 3.0), 0.5, decaying, 1.0, 1.0).pass);
  CHECK_FALSE(check_theorem2(power_spec(3.0, 2.0), 0.5, decaying, 1.0, 1.0).pass);
  const GateResult no_mu = check_theorem2(power_spec(3.0, 3.0), 0.0, decaying, 1.0, 1.0);
  CHECK_FALSE(no_mu.pass);
  CHECK_FALSE(no_mu.mu_ok);
  ResupplySpec steady;
  steady.profile = ConstantProfile{0.2};
  const GateResult r = check_theorem2(power_spec(3.0, 3.0), 0.5, steady, 1.0, 1.0);
  CHECK_FALSE(r.pass);
  CHECK_FALSE(r.r_integrable);
  ResupplySpec none;
  CHECK(check_theorem2(power_spec(3.0, 3.0), 0.5, none, 1.0, 1.0).pass);
}

TEST_CASE("resupply evaluation") {
  ResupplySpec c;
  c.profile = ConstantProfile{0.2};
  CHECK(eval_r(c, 0.3, 0.9, 5.0) == 0.2);
  ResupplySpec gauss;
  gauss.profile = GaussianProfile{0.5, 0.5, 0.2, 1.0};
  CHECK(eval_r(gauss, 0.5, 0.5, 0.0) == doctest::Approx(1.0));
  CHECK(eval_r(gauss, 0.7, 0.5, 0.0) == doctest::Approx(std::exp(-1.0)));
  CHECK_THROWS_AS(eval_r(c, 0.0, 0.0, -1.0), DomainError);
  gauss.decay_lambda = 2.0;
  CHECK(eval_r(gauss, 0.5, 0.5, 1.0) == doctest::Approx(std::exp(-2.0)));
  CHECK(gauss.r_star(1.0, 1.0) == doctest::Approx(1.0));
  CHECK(gauss.r_double_star(1.0, 1.0) == doctest::Approx(0.5));
  CHECK(std::isinf(c.r_double_star(1.0, 1.0)));
}

TEST_CASE("r double star agrees with quadrature") {
  ResupplySpec r;
  r.profile = GaussianProfile{0.3, 0.4, 0.25, 0.7};
  r.decay_lambda = 1.5;
  double sum = 0.0;
  const double dt = 1e-3;
  for (int k = 0; k < 40000; ++k) {
    const double t0 = k * dt, t1 = t0 + dt;
    sum += 0.5 * dt * (r.sup_at(t0, 1.0, 1.0) + r.sup_at(t1, 1.0, 1.0));
  }
  CHECK(sum == doctest::Approx(r.r_double_star(1.0, 1.0)).epsilon(1e-6));
  // Center outside the rectangle: sup sits on the nearest boundary point.
  ResupplySpec off;
  off.profile = GaussianProfile{1.5, 0.5, 0.5, 1.0};
  CHECK(off.spatial_sup(1.0, 1.0) == doctest::Approx(std::exp(-1.0)));
}

TEST_CASE("resupply issues") {
  ResupplySpec r;
  r.profile = ConstantProfile{-1.0};
  CHECK(resupply_issues(r).size() == 1);
  r.profile = GaussianProfile{0.5, 0.5, 0.0, 1.0};
  r.decay_lambda = -1.0;
  CHECK(resupply_issues(r).size() == 2);
}
