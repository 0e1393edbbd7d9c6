#include "taxis/kinetics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "taxis/errors.hpp"

namespace taxis {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

const double kSqrt2Plus1 = 1.0 + std::sqrt(2.0);

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

} // namespace

std::string law_name(const GrowthLaw& law) {
  return std::visit(overloaded{[](const PurePower&) { return std::string("pure_power"); },
                               [](const Allee&) { return std::string("allee"); },
                               [](const Logistic&) { return std::string("logistic"); },
                               [](const CustomLaw& c) { return c.name; }},
                    law);
}

double eval_law(const GrowthLaw& law, double s) {
  return std::visit(
      overloaded{[s](const PurePower& p) { return p.L - p.K * std::pow(s, p.alpha); },
                 [s](const Allee&) { return s * (1.0 - s) * (s - 2.0); },
                 [s](const Logistic& p) { return p.a * s - p.b * std::pow(s, p.alpha); },
                 [s](const CustomLaw& c) { return c.fn(s); }},
      law);
}

Envelope default_envelope(const GrowthLaw& law) {
  return std::visit(
      overloaded{
          [](const PurePower& p) { return Envelope{p.K, p.L, p.K, 0.0, p.alpha}; },
          [](const Allee&) { return Envelope{0.5, 9.0, 2.0, 3.0, 3.0}; },
          [](const Logistic& p) {
            // a s - b s^p <= -(b/2) s^p + L with L = max_s (a s - (b/2) s^p).
            const double c = 0.5 * p.b;
            double top = 0.0;
            if (p.a > 0.0) {
              const double s_star = std::pow(p.a / (c * p.alpha), 1.0 / (p.alpha - 1.0));
              top = p.a * s_star * (p.alpha - 1.0) / p.alpha;
            }
            return Envelope{c, top, p.b, 0.0, p.alpha};
          },
          [](const CustomLaw& c) -> Envelope {
            throw StructuralError("custom growth law '" + c.name +
                                  "' needs explicit envelope constants");
          }},
      law);
}

KineticSpec KineticSpec::with_defaults(GrowthLaw f, GrowthLaw g) {
  KineticSpec spec;
  spec.env_f = default_envelope(f);
  spec.env_g = default_envelope(g);
  spec.law_f = std::move(f);
  spec.law_g = std::move(g);
  return spec;
}

double eval_f(const KineticSpec& spec, double s) {
  if (s < 0.0) throw DomainError("f evaluated at negative density " + fmt(s));
  return eval_law(spec.law_f, s);
}

double eval_g(const KineticSpec& spec, double s) {
  if (s < 0.0) throw DomainError("g evaluated at negative density " + fmt(s));
  return eval_law(spec.law_g, s);
}

std::vector<std::string> structural_issues(const KineticSpec& spec) {
  std::vector<std::string> issues;
  auto check_env = [&](const Envelope& e, const std::string& tag, const std::string& expo) {
    if (!(e.exponent > 1.0)) issues.push_back(expo + " must exceed 1 (got " + fmt(e.exponent) + ")");
    if (!(e.K > 0.0)) issues.push_back("K_" + tag + " must be positive");
    if (!(e.k > 0.0)) issues.push_back("k_" + tag + " must be positive");
    if (!(e.L >= 0.0)) issues.push_back("L_" + tag + " must be nonnegative");
    if (!(e.l >= 0.0)) issues.push_back("l_" + tag + " must be nonnegative");
  };
  check_env(spec.env_f, "f", "alpha");
  check_env(spec.env_g, "g", "beta");
  const double f0 = eval_law(spec.law_f, 0.0);
  const double g0 = eval_law(spec.law_g, 0.0);
  if (!(f0 >= 0.0)) issues.push_back("f(0) = " + fmt(f0) + " is negative");
  if (!(g0 >= 0.0)) issues.push_back("g(0) = " + fmt(g0) + " is negative");
  return issues;
}

std::vector<double> envelope_sample_points() {
  std::vector<double> pts;
  pts.reserve(60);
  pts.push_back(0.0);
  constexpr int n = 59;
  for (int k = 0; k < n; ++k) {
    const double e = -3.0 + 9.0 * static_cast<double>(k) / static_cast<double>(n - 1);
    pts.push_back(std::pow(10.0, e));
  }
  return pts;
}

EnvelopeReport validate_envelope(const KineticSpec& spec) {
  EnvelopeReport rep;
  auto note = [&](double margin, double scale, double s, const char* label, double& slot) {
    slot = std::min(slot, margin);
    if (margin < rep.worst_margin) {
      rep.worst_margin = margin;
      rep.worst_s = s;
      rep.worst_label = label;
    }
    if (margin < -1e-12 * scale) rep.holds = false;
  };
  auto check_law = [&](const GrowthLaw& law, const Envelope& e, const char* up_label,
                       const char* lo_label, double& up_slot, double& lo_slot) {
    for (double s : envelope_sample_points()) {
      const double v = eval_law(law, s);
      const double sp = std::pow(s, e.exponent);
      const double upper = -e.K * sp + e.L;
      const double lower = -e.k * sp - e.l;
      const double scale = 1.0 + std::abs(v) + e.K * sp + e.k * sp + e.L + e.l;
      note(upper - v, scale, s, up_label, up_slot);
      note(v - lower, scale, s, lo_label, lo_slot);
    }
    // Asymptotic ratio law(s)/s^p must sit in [-k - l/s^p, -K + L/s^p].
    const double s = 1e6;
    const double sp = std::pow(s, e.exponent);
    const double ratio = eval_law(law, s) / sp;
    const double scale = 1.0 + std::abs(ratio) + e.K + e.k;
    if (ratio > -e.K + e.L / sp + 1e-12 * scale || ratio < -e.k - e.l / sp - 1e-12 * scale)
      rep.holds = false;
  };
  check_law(spec.law_f, spec.env_f, "upper f", "lower f", rep.worst_upper_f, rep.worst_lower_f);
  check_law(spec.law_g, spec.env_g, "upper g", "lower g", rep.worst_upper_g, rep.worst_lower_g);
  return rep;
}

// ---- resupply ----

double ResupplySpec::factor(double t) const {
  return decay_lambda > 0.0 ? std::exp(-decay_lambda * t) : 1.0;
}

double ResupplySpec::profile_at(double x, double y) const {
  return std::visit(overloaded{[](const ConstantProfile& c) { return c.value; },
                               [x, y](const GaussianProfile& gp) {
                                 const double dx = x - gp.cx, dy = y - gp.cy;
                                 return gp.amplitude *
                                        std::exp(-(dx * dx + dy * dy) / (gp.width * gp.width));
                               }},
                    profile);
}

double ResupplySpec::spatial_sup(double lx, double ly) const {
  return std::visit(overloaded{[](const ConstantProfile& c) { return c.value; },
                               [&](const GaussianProfile& gp) {
                                 // Closest point of the rectangle to the centre.
                                 const double px = std::clamp(gp.cx, 0.0, lx);
                                 const double py = std::clamp(gp.cy, 0.0, ly);
                                 const double dx = px - gp.cx, dy = py - gp.cy;
                                 return gp.amplitude *
                                        std::exp(-(dx * dx + dy * dy) / (gp.width * gp.width));
                               }},
                    profile);
}

double ResupplySpec::sup_at(double t, double lx, double ly) const {
  return spatial_sup(lx, ly) * factor(t);
}

double ResupplySpec::r_star(double lx, double ly) const { return spatial_sup(lx, ly); }

double ResupplySpec::r_double_star(double lx, double ly) const {
  const double s = spatial_sup(lx, ly);
  if (s == 0.0) return 0.0;
  if (!decays()) return std::numeric_limits<double>::infinity();
  return s / decay_lambda;
}

Field ResupplySpec::sample(const Grid& g, double t) const {
  const double ft = factor(t);
  return taxis::sample(g, [&](double x, double y) { return profile_at(x, y) * ft; });
}

double eval_r(const ResupplySpec& r, double x, double y, double t) {
  if (t < 0.0) throw DomainError("resupply evaluated at negative time " + fmt(t));
  return r.profile_at(x, y) * r.factor(t);
}

std::vector<std::string> resupply_issues(const ResupplySpec& r) {
  std::vector<std::string> issues;
  std::visit(overloaded{[&](const ConstantProfile& c) {
                          if (!(c.value >= 0.0)) issues.push_back("constant resupply is negative");
                        },
                        [&](const GaussianProfile& gp) {
                          if (!(gp.amplitude >= 0.0))
                            issues.push_back("resupply amplitude is negative");
                          if (!(gp.width > 0.0)) issues.push_back("resupply width must be positive");
                        }},
             r.profile);
  if (!(r.decay_lambda >= 0.0)) issues.push_back("decay_lambda must be nonnegative");
  return issues;
}

// ---- gates ----

GateResult check_theorem1(const KineticSpec& spec) {
  GateResult gate;
  const double a = spec.alpha(), b = spec.beta();
  gate.alpha_margin = a - kSqrt2Plus1;
  gate.alpha_ok = gate.alpha_margin > 0.0;
  if (!gate.alpha_ok) gate.failures.push_back("alpha = " + fmt(a) + " does not exceed 1+sqrt(2)");
  if (a > 1.0) {
    gate.min_cond_margin = std::min(a, b) - (a + 1.0) / (a - 1.0);
  } else {
    gate.min_cond_margin = -std::numeric_limits<double>::infinity();
  }
  gate.min_cond_ok = gate.min_cond_margin > 0.0;
  if (!gate.min_cond_ok)
    gate.failures.push_back("min(alpha, beta) = " + fmt(std::min(a, b)) +
                            " does not exceed (alpha+1)/(alpha-1)");
  gate.pass = gate.alpha_ok && gate.min_cond_ok;
  gate.knife_edge = std::abs(gate.alpha_margin) < kKnifeEdge ||
                    std::abs(gate.min_cond_margin) < kKnifeEdge;
  return gate;
}

GateResult check_theorem2(const KineticSpec& spec, double mu, const ResupplySpec& r, double lx,
                          double ly) {
  GateResult gate = check_theorem1(spec);
  gate.beta_margin = spec.beta() - kSqrt2Plus1;
  gate.beta_ok = gate.beta_margin > 0.0;
  if (!gate.beta_ok)
    gate.failures.push_back("beta = " + fmt(spec.beta()) + " does not exceed 1+sqrt(2)");
  gate.mu_ok = mu > 0.0;
  if (!gate.mu_ok) gate.failures.push_back("mu must be positive");
  gate.r_integrable = std::isfinite(r.r_double_star(lx, ly));
  if (!gate.r_integrable) gate.failures.push_back("resupply is not integrable in time");
  gate.pass = gate.pass && gate.beta_ok && gate.mu_ok && gate.r_integrable;
  gate.knife_edge = gate.knife_edge || std::abs(gate.beta_margin) < kKnifeEdge;
  return gate;
}

} // namespace taxis
