#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "taxis/grid.hpp"
#include "taxis/solver.hpp"

namespace taxis {

// ---- bound constants and the scalar ODE tools ----

/// max{y0, |Omega| (L/K)^(1/alpha)}: the level a solution of
/// y' + (K / |Omega|^(alpha-1)) y^alpha <= L |Omega| never exceeds.
double mass_ode_star(double alpha, double K, double L, double omega_vol, double y0);

/// y0 + C / (1 - e^{-a}) for y' + a y <= h with windowed integral of h at most C.
double comparison_ode_bound(double y0, double a, double C);

struct BoundConstants {
  double u_star = 0.0;
  double v_star = 0.0;
  /// ||w0||_inf + r_star / mu; +infinity when mu = 0.
  double w_star = 0.0;
  double window_alpha_bound = 0.0; // L_f |Omega| / K_f + u_star / K_f
  double window_beta_bound = 0.0;  // L_g |Omega| / K_g + v_star / K_g
};

BoundConstants bound_constants(const KineticSpec& kin, double mu, double r_star, double omega_vol,
                               double mass_u0, double mass_v0, double w0_sup);
BoundConstants bound_constants(const ModelParams& params, const Grid& g, const InitialData& init);

// ---- report entries ----

enum class Verdict { Pass, Fail, Report, Skipped };

const char* verdict_name(Verdict v);

struct MonitorEntry {
  double t = 0.0;
  std::string name;
  double value = 0.0;
  double bound = 0.0;
  /// bound - value
  double margin = 0.0;
  double tolerance = 0.0;
  Verdict verdict = Verdict::Report;
  /// Window start for windowed checks (the window is [window_start, t]).
  std::optional<double> window_start;
  std::string note;
};

/// Pass iff margin >= -tolerance.
MonitorEntry upper_bound_entry(double t, std::string name, double value, double bound,
                               double tolerance);

/// Monitor slack: 1e-6 absolute plus 10 dt relative to the bound.
double default_tolerance(double bound, double dt);

// ---- individual checks ----

/// Integral of u and v against u_star and v_star.
std::array<MonitorEntry, 2> check_mass(const State& state, const Grid& g,
                                       const BoundConstants& consts, double dt);

/// Exact-exponential recursion for the spatially homogeneous supersolution
///   wbar(t) = ||w0|| e^{-mu t} + int_0^t e^{-mu (t-s)} ||r(., s)|| ds.
/// The step integral treats ||r|| as log-linear between samples (linear when a
/// sample vanishes), which is exact for constant and exponential factors.
class SupersolutionTracker {
public:
  SupersolutionTracker(double w0_sup, double mu, double r_sup0, double t0 = 0.0);

  void advance(double t_new, double r_sup_new);
  double value() const noexcept { return wbar_; }
  double time() const noexcept { return t_; }

  /// Integral over [0, dt] of e^{-mu (dt - s)} R(s) with log-linear R.
  static double step_integral(double mu, double dt, double r0, double r1);

private:
  double mu_;
  double wbar_;
  double t_;
  double r_last_;
};

/// ||w||_inf against wbar (tolerance 1e-6 + 10 dt) and, for mu > 0, against
/// the ceiling w_star (tolerance 1e-6).
std::vector<MonitorEntry> check_w_supersolution(const State& state,
                                                const SupersolutionTracker& wbar,
                                                const BoundConstants& consts, double mu,
                                                double dt);

/// Trapezoidal time integrals of per-snapshot spatial quantities with unit
/// sliding windows.
class WindowBuffer {
public:
  explicit WindowBuffer(std::vector<std::string> series);

  void push(double t, std::span<const double> values);

  /// Integral of a series over [t0, t1] within the retained history.
  double integral(std::size_t series, double t0, double t1) const;
  double cumulative(std::size_t series) const;
  double t_first() const { return t_.empty() ? 0.0 : t0_; }
  double t_last() const { return t_.empty() ? 0.0 : t_.back(); }
  bool empty() const noexcept { return t_.empty(); }
  std::size_t index_of(const std::string& name) const;
  /// (t, cumulative) history of one series since the first push.
  const std::vector<std::pair<double, double>>& history(std::size_t series) const {
    return history_[series];
  }

private:
  double cumulative_at(std::size_t series, double t) const;

  void compact();

  std::vector<std::string> names_;
  double t0_ = 0.0;
  std::size_t head_ = 0;
  std::vector<double> t_;
  std::vector<std::vector<double>> cum_;
  std::vector<double> last_;
  std::vector<std::vector<std::pair<double, double>>> history_;
};

/// Window integrals of u^alpha and v^beta over the latest unit window.
/// Series must be named "u_alpha" and "v_beta". Windows shorter than one time
/// unit come back as Skipped "insufficient window".
std::array<MonitorEntry, 2> check_window_integrals(const WindowBuffer& buf,
                                                   const BoundConstants& consts, double dt);

/// Running record of int v(t) = int v0 + int_0^t int g(v), with the time
/// integral accumulated by the trapezoidal rule.
class VMassLedger {
public:
  VMassLedger(double t0, double mass_v0, double g_integral0);
  void push(double t, double mass_v, double g_integral);

  double lhs() const noexcept { return mass_v_; }
  double rhs() const noexcept { return mass_v0_ + g_cumulative_; }
  /// int v0 + int_0^t |int g|: the scale relative residuals are measured against.
  double throughput() const noexcept { return mass_v0_ + g_abs_cumulative_; }
  double residual() const noexcept { return lhs() - rhs(); }
  double relative_residual() const noexcept;
  double time() const noexcept { return t_; }

private:
  double t_;
  double mass_v0_;
  double mass_v_;
  double g_last_;
  double g_cumulative_ = 0.0;
  double g_abs_cumulative_ = 0.0;
};

/// Relative residual against 1e-6 + 10 dt.
MonitorEntry check_v_mass_identity(const VMassLedger& ledger, double dt);

struct LinearFit {
  double intercept = 0.0;
  double slope = 0.0;
};

/// Least-squares line through (x, y) pairs; zero slope for fewer than 2 points.
LinearFit least_squares(std::span<const double> x, std::span<const double> y);

/// Cumulative int int |grad v|^2/(v+1)^2 with a + b T fit. Report-only.
MonitorEntry check_log_gradient_energy(const WindowBuffer& buf);

// ---- nutrient decay ----

struct DecaySample {
  double t = 0.0;
  double w_sup = 0.0;
  double w_integral = 0.0;
  double consumption_integral = 0.0;
};

struct DecayResult {
  bool hypotheses_met = true;
  bool detected = false;
  double t_detect = 0.0;
  double tail_w = 0.0;
  double tail_consumption = 0.0;
};

/// Smallest recorded time after which ||w||_inf stays below delta for the
/// rest of the record, with the trapezoidal tail integrals from there on.
DecayResult detect_w_decay(std::span<const DecaySample> trajectory, double delta,
                           bool hypotheses_met = true);

// ---- weighted functional ----

struct FunctionalParams {
  double q = 2.0;
  double theta = 0.0;
  double delta = 0.0;
  /// 2(q-1) - 4(q + 2q(q-1) + q(q-1)^2) theta
  double theta_margin = 0.0;
  /// min{1, theta, 1/(4q)} - delta
  double delta_margin = 0.0;
  /// q(q-1) - (2q theta + 2q(q-1) delta)^2 / (4(theta(theta+1) - 2q theta delta))
  double quotient_margin = 0.0;
  double quotient = 0.0;
};

/// theta at half its ceiling, delta at half of min{1, theta, 1/(4q)}. Throws
/// DomainError for q <= 1; asserts all three margins positive.
FunctionalParams pick_theta_delta(double q);

/// int u^q / (2 delta - w)^theta. Empty when ||w||_inf >= delta.
std::optional<double> weighted_functional(const State& state, const Grid& g,
                                          const FunctionalParams& fp);

// ---- eventual regularity ----

struct RegularitySample {
  double t = 0.0;
  double u_sup = 0.0;
  double v_sup = 0.0;
  double grad_u = 0.0;
  double grad_v = 0.0;
  double grad_w = 0.0;
  double w2p_u = 0.0;
  /// NaN while the functional is not defined.
  double functional = 0.0;
};

struct RegularityQuantity {
  std::string name;
  double sup = 0.0;
  double slope = 0.0;
  std::size_t samples = 0;
};

struct RegularityReport {
  bool evaluated = false;
  bool regularized = false;
  double t_from = 0.0;
  std::vector<RegularityQuantity> quantities;
};

inline constexpr double kRegularitySlopeTol = 1e-3;

/// Least-squares growth slopes over the samples with t > t_detect + 1.
/// Regularized iff every slope is at most tol_slope.
RegularityReport eventual_regularity_report(std::span<const RegularitySample> trajectory,
                                            double t_detect,
                                            double tol_slope = kRegularitySlopeTol);

// ---- suite ----

struct MonitorSettings {
  /// Decay threshold for the nutrient.
  double delta = 1e-2;
  /// Exponent of the weighted functional and the L^q ladder.
  double q = 2.0;
  /// Evaluate decay and regularity (second gate passed).
  bool decay_armed = false;
};

struct CheckSummary {
  std::uint64_t evaluations = 0;
  std::uint64_t failures = 0;
  double worst_margin = std::numeric_limits<double>::infinity();
  double worst_t = 0.0;
  double last_value = 0.0;
};

struct SuiteReport {
  std::map<std::string, CheckSummary> checks;
  DecayResult decay;
  RegularityReport regularity;
  LinearFit log_gradient_fit;
  double max_v_mass_relative_residual = 0.0;
  bool all_passed() const;
};

/// Runs every check on each accepted state. observe() returns the entries of
/// that state; the suite keeps summaries and the decay/regularity records.
class MonitorSuite {
public:
  MonitorSuite(const Grid& g, const ModelParams& params, const InitialData& init,
               MonitorSettings settings);

  /// dt is the step that produced the state (0 for the initial state).
  std::vector<MonitorEntry> observe(const State& state, double dt);

  SuiteReport finish() const;

  const BoundConstants& constants() const noexcept { return consts_; }
  const FunctionalParams& functional_params() const noexcept { return fp_; }
  const std::vector<DecaySample>& decay_samples() const noexcept { return decay_; }
  const std::vector<RegularitySample>& regularity_samples() const noexcept { return regularity_; }
  const VMassLedger& v_ledger() const noexcept { return ledger_; }

private:
  void record(const MonitorEntry& e);

  Grid grid_;
  ModelParams params_;
  MonitorSettings settings_;
  BoundConstants consts_;
  FunctionalParams fp_;
  SupersolutionTracker wbar_;
  WindowBuffer window_;
  VMassLedger ledger_;
  double max_dt_ = 0.0;
  bool started_ = false;
  std::map<std::string, CheckSummary> summary_;
  std::vector<DecaySample> decay_;
  std::vector<RegularitySample> regularity_;
  double max_rel_residual_ = 0.0;
};

} // namespace taxis
