#pragma once

#include <cstdint>
#include <functional>

#include "taxis/grid.hpp"
#include "taxis/kinetics.hpp"
#include "taxis/linear_solver.hpp"

namespace taxis {

/// Decay rate, consumption regularization and the kinetic/resupply data.
/// epsilon = 0 is the unregularized system.
struct ModelParams {
  double mu = 0.0;
  double epsilon = 0.0;
  ResupplySpec resupply{};
  KineticSpec kinetics{};
};

/// Throws DomainError on mu < 0 or epsilon outside [0, 1).
void validate(const ModelParams& params);

/// Regularized consumption rate (u + v) / (1 + eps (u + v) w); multiplying by
/// w gives the consumption term.
inline double consumption_rate(double u, double v, double w, double eps) {
  const double s = u + v;
  return s / (1.0 + eps * s * w);
}

struct InitialData {
  Field u0;
  Field v0;
  Field w0;
};

/// Nonnegativity of all three fields and positive mass of u0 and v0.
/// Throws DomainError.
void validate(const InitialData& init, const Grid& g);

struct State {
  Field u;
  Field v;
  Field w;
  double t = 0.0;
  std::uint64_t step_index = 0;
};

State initial_state(const InitialData& init);

struct StepControl {
  double dt_max = 1e-3;
  double safety = 0.2;
  double solve_tol = 1e-10;
  int max_iter = 2000;
  /// false: every step uses dt_max.
  bool adaptive = true;
};

void validate(const StepControl& control);

/// Entries in [-kClampFloor, 0) are set to zero after a step; anything lower
/// is a positivity violation.
inline constexpr double kClampFloor = 1e-12;
/// Sup-norm ceiling of the blow-up watchdog.
inline constexpr double kBlowUpCeiling = 1e8;

struct StepDiagnostics {
  std::uint64_t clamp_count = 0;
  double max_clamp = 0.0;
  SolveStats solve_u, solve_v, solve_w;
  /// integral(new) - integral(old) - dt * integral(reaction + source).
  double mass_defect_u = 0.0;
  double mass_defect_v = 0.0;
};

/// Manufactured source terms at time t, added to the right-hand sides of the
/// three equations. Empty means no forcing.
using Forcing = std::function<void(double t, Field& su, Field& sv, Field& sw)>;

/// One first-order IMEX step in cascade order u -> v -> w:
///   (I - dt Lap) u'  = u + dt (-div(u grad w) + f(u))
///   (I - dt Lap) v'  = v + dt (-div(v grad u') + g(v))
///   (I - dt Lap + dt mu + dt C) w' = w + dt r(t + dt),
///   C = (u' + v') / (1 + eps (u' + v') w).
/// Throws PositivityError, SolverError or BlowUpError.
State step(const State& state, const ModelParams& params, double dt, const Grid& g,
           const StepControl& control = {}, StepDiagnostics* diagnostics = nullptr,
           const Forcing& forcing = {});

/// Largest |law'| on [0, s_max], from centered differences at nine points.
double max_slope(const GrowthLaw& law, double s_max);

/// safety * min(dt_max, h_min / (max|grad w| + max|grad u| + tiny),
///               1 / (1 + max|f'| + max|g'|)).
double suggest_dt(const State& state, const ModelParams& params, const Grid& g,
                  const StepControl& control);

} // namespace taxis
