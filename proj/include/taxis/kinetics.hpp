#pragma once

#include <functional>
#include <limits>
#include <string>
#include <variant>
#include <vector>

#include "taxis/grid.hpp"

namespace taxis {

// ---- growth laws ----

/// s -> L - K s^alpha
struct PurePower {
  double K = 1.0;
  double L = 1.0;
  double alpha = 3.0;
};

/// s -> s (1 - s)(s - 2)
struct Allee {};

/// s -> a s - b s^alpha
struct Logistic {
  double a = 1.0;
  double b = 1.0;
  double alpha = 2.0;
};

/// User-supplied law. Envelope constants must be given explicitly.
struct CustomLaw {
  std::string name;
  std::function<double(double)> fn;
};

using GrowthLaw = std::variant<PurePower, Allee, Logistic, CustomLaw>;

std::string law_name(const GrowthLaw& law);

/// Raw law evaluation, no domain check.
double eval_law(const GrowthLaw& law, double s);

/// Constants of -k s^p - l <= law(s) <= -K s^p + L.
struct Envelope {
  double K = 1.0;
  double L = 0.0;
  double k = 1.0;
  double l = 0.0;
  double exponent = 2.0;
};

/// Default envelope shipped with each law. PurePower is tight from above
/// (k = K, l = 0); Allee uses (1/2, 9, 2, 3) with exponent 3. Throws
/// StructuralError for CustomLaw.
Envelope default_envelope(const GrowthLaw& law);

/// Growth laws for both populations with their envelope constants.
/// alpha and beta are the envelope exponents of f and g.
struct KineticSpec {
  GrowthLaw law_f = PurePower{};
  GrowthLaw law_g = PurePower{};
  Envelope env_f{};
  Envelope env_g{};

  double alpha() const noexcept { return env_f.exponent; }
  double beta() const noexcept { return env_g.exponent; }
  double rho() const noexcept { return alpha() < beta() ? alpha() : beta(); }

  /// Builds a spec whose envelopes are the laws' defaults.
  static KineticSpec with_defaults(GrowthLaw f, GrowthLaw g);
};

/// Throws DomainError for s < 0.
double eval_f(const KineticSpec& spec, double s);
double eval_g(const KineticSpec& spec, double s);

/// Structural checks on constants plus f(0) >= 0 and g(0) >= 0. Returns the
/// list of violated requirements (empty when valid).
std::vector<std::string> structural_issues(const KineticSpec& spec);

struct EnvelopeReport {
  bool holds = true;
  double worst_margin = std::numeric_limits<double>::infinity();
  double worst_upper_f = std::numeric_limits<double>::infinity();
  double worst_lower_f = std::numeric_limits<double>::infinity();
  double worst_upper_g = std::numeric_limits<double>::infinity();
  double worst_lower_g = std::numeric_limits<double>::infinity();
  /// Sample point where the worst (most negative or smallest) margin sits.
  double worst_s = 0.0;
  std::string worst_label;
};

/// Sample points used by validate_envelope: 0 followed by 59 geometric points
/// from 1e-3 to 1e6.
std::vector<double> envelope_sample_points();

/// Checks both envelope inequalities of f and g on the geometric sample, plus
/// the asymptotic ratio law(s)/s^p at s = 1e6 against [-k, -K].
EnvelopeReport validate_envelope(const KineticSpec& spec);

// ---- nutrient resupply ----

struct ConstantProfile {
  double value = 0.0;
};

struct GaussianProfile {
  double cx = 0.5;
  double cy = 0.5;
  double width = 0.2;
  double amplitude = 1.0;
};

/// r(x, y, t) = profile(x, y) * factor(t); factor is 1, or exp(-decay_lambda t)
/// when decay_lambda > 0.
struct ResupplySpec {
  std::variant<ConstantProfile, GaussianProfile> profile = ConstantProfile{};
  double decay_lambda = 0.0;

  double factor(double t) const;
  /// Spatial profile only.
  double profile_at(double x, double y) const;
  /// sup over [0, lx] x [0, ly] of the spatial profile.
  double spatial_sup(double lx, double ly) const;
  /// sup over space of r(., t).
  double sup_at(double t, double lx, double ly) const;
  double r_star(double lx, double ly) const;
  /// Time integral of sup_x r; +infinity unless the factor decays.
  double r_double_star(double lx, double ly) const;
  bool decays() const noexcept { return decay_lambda > 0.0; }

  /// Samples r(., t) on the grid.
  Field sample(const Grid& g, double t) const;
};

/// Throws DomainError for t < 0.
double eval_r(const ResupplySpec& r, double x, double y, double t);

std::vector<std::string> resupply_issues(const ResupplySpec& r);

// ---- parameter gates ----

/// Margins below this are flagged as knife-edge; the inequalities themselves
/// are strict with no tolerance.
inline constexpr double kKnifeEdge = 1e-9;

struct GateResult {
  bool pass = false;
  bool alpha_ok = false;      // alpha > 1 + sqrt 2
  bool min_cond_ok = false;   // min(alpha, beta) > (alpha + 1)/(alpha - 1)
  bool beta_ok = true;        // beta > 1 + sqrt 2 (second gate only)
  bool mu_ok = true;          // mu > 0 (second gate only)
  bool r_integrable = true;   // r_double_star finite (second gate only)
  double alpha_margin = 0.0;
  double min_cond_margin = 0.0;
  double beta_margin = 0.0;
  bool knife_edge = false;
  std::vector<std::string> failures;
};

/// Global generalized solvability hypotheses.
GateResult check_theorem1(const KineticSpec& spec);

/// Eventual regularity hypotheses: the first gate plus beta > 1 + sqrt 2,
/// mu > 0 and a time-integrable resupply.
GateResult check_theorem2(const KineticSpec& spec, double mu, const ResupplySpec& r, double lx,
                          double ly);

} // namespace taxis
