#include "taxis/solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "taxis/errors.hpp"

namespace taxis {

void validate(const ModelParams& params) {
  if (!(params.mu >= 0.0)) throw DomainError("mu must be nonnegative");
  if (!(params.epsilon >= 0.0 && params.epsilon < 1.0))
    throw DomainError("epsilon must lie in [0, 1)");
}

void validate(const InitialData& init, const Grid& g) {
  require_conforming(init.u0, g);
  require_conforming(init.v0, g);
  require_conforming(init.w0, g);
  auto nonneg = [](const Field& f, const char* name) {
    for (std::size_t k = 0; k < f.size(); ++k)
      if (!(f[k] >= 0.0) || !std::isfinite(f[k]))
        throw DomainError(std::string(name) + " must be finite and nonnegative");
  };
  nonneg(init.u0, "u0");
  nonneg(init.v0, "v0");
  nonneg(init.w0, "w0");
  if (!(integrate(init.u0, g) > 0.0)) throw DomainError("u0 must have positive mass");
  if (!(integrate(init.v0, g) > 0.0)) throw DomainError("v0 must have positive mass");
}

State initial_state(const InitialData& init) { return State{init.u0, init.v0, init.w0, 0.0, 0}; }

void validate(const StepControl& c) {
  if (!(c.dt_max > 0.0)) throw DomainError("dt_max must be positive");
  if (!(c.safety > 0.0 && c.safety <= 1.0)) throw DomainError("safety must lie in (0, 1]");
  if (!(c.solve_tol > 0.0)) throw DomainError("solve tolerance must be positive");
  if (c.max_iter <= 0) throw DomainError("max_iter must be positive");
}

namespace {

void watchdog(const Field& f, const char* name) {
  for (double v : f.values())
    if (!std::isfinite(v) || std::abs(v) > kBlowUpCeiling)
      throw BlowUpError(std::string("watchdog: ") + name + " reached " + std::to_string(v));
}

void clamp(Field& f, const Grid& g, const char* name, StepDiagnostics& d) {
  for (std::size_t k = 0; k < f.size(); ++k) {
    const double v = f[k];
    if (v >= 0.0) continue;
    if (v < -kClampFloor) throw PositivityError(name, k % g.nx(), k / g.nx(), v);
    d.clamp_count += 1;
    d.max_clamp = std::max(d.max_clamp, -v);
    f[k] = 0.0;
  }
}

} // namespace

State step(const State& state, const ModelParams& params, double dt, const Grid& g,
           const StepControl& control, StepDiagnostics* diagnostics, const Forcing& forcing) {
  require_conforming(state.u, g);
  require_conforming(state.v, g);
  require_conforming(state.w, g);
  if (!(dt > 0.0)) throw DomainError("time step must be positive");

  StepDiagnostics local;
  StepDiagnostics& d = diagnostics ? *diagnostics : local;
  d = StepDiagnostics{};
  const SolveOptions opts{control.solve_tol, control.max_iter};
  const std::size_t n = g.size();
  const double t_new = state.t + dt;
  const KineticSpec& kin = params.kinetics;

  Field su, sv, sw;
  if (forcing) {
    su = Field(g);
    sv = Field(g);
    sw = Field(g);
    forcing(t_new, su, sv, sw);
  }

  State next;
  next.t = t_new;
  next.step_index = state.step_index + 1;

  // (a) forager
  Field rhs = taxis_divergence(state.u, state.w, g);
  Field react(g);
  for (std::size_t k = 0; k < n; ++k) {
    react[k] = eval_law(kin.law_f, state.u[k]);
    if (forcing) react[k] += su[k];
    rhs[k] = state.u[k] + dt * (react[k] - rhs[k]);
  }
  next.u = state.u;
  d.solve_u = solve_shifted_laplacian(g, dt, {}, rhs, next.u, opts);
  watchdog(next.u, "u");
  d.mass_defect_u = integrate(next.u, g) - integrate(state.u, g) - dt * integrate(react, g);
  clamp(next.u, g, "u", d);

  // (b) exploiter, attracted by the fresh forager density
  rhs = taxis_divergence(state.v, next.u, g);
  for (std::size_t k = 0; k < n; ++k) {
    react[k] = eval_law(kin.law_g, state.v[k]);
    if (forcing) react[k] += sv[k];
    rhs[k] = state.v[k] + dt * (react[k] - rhs[k]);
  }
  next.v = state.v;
  d.solve_v = solve_shifted_laplacian(g, dt, {}, rhs, next.v, opts);
  watchdog(next.v, "v");
  d.mass_defect_v = integrate(next.v, g) - integrate(state.v, g) - dt * integrate(react, g);
  clamp(next.v, g, "v", d);

  // (c) nutrient, consumption semi-implicit
  std::vector<double> diag(n);
  for (std::size_t k = 0; k < n; ++k) {
    diag[k] = params.mu + consumption_rate(next.u[k], next.v[k], state.w[k], params.epsilon);
    rhs[k] = state.w[k] + dt * params.resupply.profile_at(g.x(k % g.nx()), g.y(k / g.nx())) *
                              params.resupply.factor(t_new);
    if (forcing) rhs[k] += dt * sw[k];
  }
  next.w = state.w;
  d.solve_w = solve_shifted_laplacian(g, dt, diag, rhs, next.w, opts);
  watchdog(next.w, "w");
  clamp(next.w, g, "w", d);

  return next;
}

double max_slope(const GrowthLaw& law, double s_max) {
  double m = 0.0;
  const int n = s_max > 0.0 ? 9 : 1;
  for (int k = 0; k < n; ++k) {
    const double s = n > 1 ? s_max * static_cast<double>(k) / 8.0 : 0.0;
    const double h = 1e-6 * std::max(1.0, s);
    double slope;
    if (s - h < 0.0)
      slope = (eval_law(law, s + h) - eval_law(law, s)) / h;
    else
      slope = (eval_law(law, s + h) - eval_law(law, s - h)) / (2.0 * h);
    m = std::max(m, std::abs(slope));
  }
  return m;
}

double suggest_dt(const State& state, const ModelParams& params, const Grid& g,
                  const StepControl& control) {
  constexpr double tiny = 1e-30;
  const double grad = max_face_gradient(state.w, g) + max_face_gradient(state.u, g);
  const double advective = g.h_min() / (grad + tiny);
  const double reactive = 1.0 / (1.0 + max_slope(params.kinetics.law_f, norm_linf(state.u)) +
                                 max_slope(params.kinetics.law_g, norm_linf(state.v)));
  return control.safety * std::min({control.dt_max, advective, reactive});
}

} // namespace taxis
