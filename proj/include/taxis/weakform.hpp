#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "taxis/grid.hpp"
#include "taxis/solver.hpp"

namespace taxis {

// ---- test functions ----

/// exp(1 - 1/(1 - rho^2)) with rho = |X - c| / radius, or the constant 1.
struct SpatialFactor {
  bool constant = true;
  double cx = 0.5;
  double cy = 0.5;
  double radius = 0.25;

  static SpatialFactor one() { return {}; }
  static SpatialFactor bump(double cx, double cy, double radius) {
    return {false, cx, cy, radius};
  }

  double value(double x, double y) const;
  std::array<double, 2> gradient(double x, double y) const;
};

/// Bump: exp(1 - 1/(1 - s^2)) with s mapping [a, b] onto [-1, 1].
/// Start: 1 on [0, a], smooth monotone descent to 0 at b, 0 afterwards.
struct TemporalFactor {
  enum class Kind { Bump, Start };
  Kind kind = Kind::Bump;
  double a = 0.0;
  double b = 1.0;

  static TemporalFactor bump(double a, double b) { return {Kind::Bump, a, b}; }
  static TemporalFactor start(double a, double b) { return {Kind::Start, a, b}; }

  double value(double t) const;
  double derivative(double t) const;
  double support_begin() const { return kind == Kind::Start ? 0.0 : a; }
  double support_end() const { return b; }
};

struct TestTerm {
  double coefficient = 1.0;
  SpatialFactor space;
  TemporalFactor time;
};

/// Finite sum of separable terms coefficient * space(x, y) * time(t).
struct TestFunction {
  std::string name;
  std::vector<TestTerm> terms;

  static TestFunction separable(std::string name, SpatialFactor s, TemporalFactor t,
                                double coefficient = 1.0);

  double value(double x, double y, double t) const;
  double time_derivative(double x, double y, double t) const;
  std::array<double, 2> gradient(double x, double y, double t) const;
  double support_begin() const;
  double support_end() const;
  /// Every coefficient nonnegative (each factor is nonnegative).
  bool nonnegative() const;
  bool empty() const { return terms.empty(); }
};

/// a * phi1 + b * phi2.
TestFunction combine(double a, const TestFunction& phi1, double b, const TestFunction& phi2);

/// The five shipped functions scaled to [0, t_end] and the rectangle: one
/// constant-in-space bump in time, two off-center bumps times a start factor,
/// two off-center bumps times interior time bumps.
std::vector<TestFunction> standard_basis(double t_end, double lx, double ly);

// ---- evaluation ----

enum class Identity { ForagerU, NutrientW, LogExploiterV };

const char* identity_name(Identity id);

struct WeakResult {
  std::string test_fn;
  std::string identity;
  double value = 0.0;
  double budget = 0.0;
  bool pass = true;
  /// Support disjoint from the recorded times; value is exactly 0.
  bool vacuous = false;
};

struct MassSlackSample {
  double t = 0.0;
  double slack = 0.0;
};

inline constexpr double kMassSlackTolerance = 1e-3;

/// Streams trajectory nodes in increasing time and accumulates, per test
/// function, the residuals of the u and w identities and the defect of the
/// ln(v+1) inequality with midpoint quadrature in space (face differences for
/// gradients, analytic gradients of the test function) and the trapezoidal
/// rule in time. The w identity uses the unregularized consumption (u+v)w.
///
/// The budget of each value is 1e-6 + (h_max + dt_max) * sum of |term
/// integrals|, where dt_max is the largest node spacing. Identities pass when
/// |value| <= budget, the ln(v+1) inequality when value >= -budget.
class WeakFormEvaluator {
public:
  WeakFormEvaluator(const Grid& g, const ModelParams& params, std::vector<TestFunction> basis,
                    Forcing forcing = {});

  void add(double t, const Field& u, const Field& v, const Field& w);

  /// Throws StructuralError when a support overlaps the recorded range only
  /// partially, or needs t = 0 that was not recorded.
  std::vector<WeakResult> results() const;
  /// Residual of one identity for basis function k.
  double value(std::size_t k, Identity id) const;

  /// int v0 + int_0^t int g(v) - int v(t) at every node.
  const std::vector<MassSlackSample>& mass_slack() const noexcept { return slack_; }
  double min_mass_slack() const;
  std::size_t nodes() const noexcept { return nodes_; }

private:
  struct Spatial {
    Field cell;          // psi at cell centers
    std::vector<double> fx_val, fx_grad; // x faces: psi, d/dx psi
    std::vector<double> fy_val, fy_grad; // y faces: psi, d/dy psi
  };
  static constexpr std::size_t kTermsU = 5, kTermsV = 7, kTermsW = 6;
  struct Accum {
    std::array<double, kTermsU + 1> u{};
    std::array<double, kTermsV + 1> v{};
    std::array<double, kTermsW + 1> w{};
  };

  void integrands(std::size_t k, double t, const Field& u, const Field& v, const Field& w,
                  const Field& L, const Field* su, const Field* sv, const Field* sw, Accum& out) const;

  Grid grid_;
  ModelParams params_;
  std::vector<TestFunction> basis_;
  Forcing forcing_;
  std::vector<std::vector<Spatial>> spatial_; // [function][term]
  Field profile_;
  std::vector<Accum> sum_, prev_;
  std::size_t nodes_ = 0;
  double t_first_ = 0.0, t_last_ = 0.0, dt_max_ = 0.0;
  double mass_v0_ = 0.0, g_prev_ = 0.0, g_cum_ = 0.0;
  std::vector<MassSlackSample> slack_;
};

// ---- recorded trajectories ----

struct TrajectoryEntry {
  double t = 0.0;
  std::uint64_t step = 0;
  std::filesystem::path u, v, w;
};

/// FLD1 snapshot triples u_/v_/w_{step:08}.fld in one directory.
class TrajectoryHandle {
public:
  /// Throws StructuralError for a missing component, nonconforming grids or
  /// times that do not increase strictly.
  static TrajectoryHandle open(const std::filesystem::path& dir);

  const Grid& grid() const { return grid_; }
  const std::vector<TrajectoryEntry>& entries() const noexcept { return entries_; }
  State load(std::size_t k) const;

  /// Feeds every snapshot to the evaluator.
  void stream(WeakFormEvaluator& eval) const;

private:
  TrajectoryHandle(Grid g) : grid_(std::move(g)) {}
  Grid grid_;
  std::vector<TrajectoryEntry> entries_;
};

double residual_u(const TrajectoryHandle& traj, const TestFunction& phi, const ModelParams& params);
double residual_w(const TrajectoryHandle& traj, const TestFunction& phi, const ModelParams& params);
/// Throws DomainError for a test function with a negative coefficient.
double defect_v(const TrajectoryHandle& traj, const TestFunction& psi, const ModelParams& params);
std::vector<MassSlackSample> check_mass_inequality(const TrajectoryHandle& traj,
                                                   const ModelParams& params);

/// CSV with header test_fn,identity,value,budget,pass plus one
/// mass_inequality row (minimum slack over the nodes).
void write_weakform_csv(std::ostream& os, const std::vector<WeakResult>& rows, double min_slack);

} // namespace taxis
