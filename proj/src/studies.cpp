#include "taxis/studies.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <optional>
#include <cmath>

#include "taxis/errors.hpp"
#include "taxis/weakform.hpp"

namespace taxis {

double observed_order(double err_coarse, double err_fine, double h_coarse, double h_fine) {
  return std::log(err_coarse / err_fine) / std::log(h_coarse / h_fine);
}

MmsStudy run_mms(const MmsOptions& opt) {
  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  for (std::size_t k = 1; k < opt.levels.size(); ++k)
    if (!(opt.levels[k] > opt.levels[k - 1]))
      throw StructuralError("mms levels must be strictly ascending");
  const ManufacturedTriple tri = manufactured_triple(opt.triple);

  MmsStudy study;
  study.triple = tri.name;
  bool exact = true;
  for (std::size_t nx : opt.levels) {
    const auto t0 = clock::now();
    const Grid g(nx, nx);
    MmsLevel lev;
    lev.nx = nx;
    lev.h = g.h_min();
    lev.steps = opt.t_end > 0.0
                    ? static_cast<std::size_t>(std::ceil(opt.t_end / (opt.dt_factor * lev.h * lev.h) - 1e-9))
                    : 0;
    lev.dt = lev.steps > 0 ? opt.t_end / static_cast<double>(lev.steps) : 0.0;

    const Forcing forcing = mms_forcing(tri, opt.params, g);
    const auto f0 = manufactured_fields(tri, g, 0.0);
    State s{f0[0], f0[1], f0[2], 0.0, 0};
    StepControl control;
    control.adaptive = false;
    control.dt_max = lev.dt > 0.0 ? lev.dt : 1.0;
    std::optional<WeakFormEvaluator> weak;
    if (opt.weak_form && lev.steps > 0) {
      weak.emplace(g, opt.params, standard_basis(opt.t_end, g.lx(), g.ly()), forcing);
      weak->add(s.t, s.u, s.v, s.w);
    }
    for (std::size_t n = 0; n < lev.steps; ++n) {
      s = step(s, opt.params, lev.dt, g, control, nullptr, forcing);
      if (n + 1 == lev.steps) s.t = opt.t_end;
      if (weak) weak->add(s.t, s.u, s.v, s.w);
    }
    const auto exact_fields = manufactured_fields(tri, g, s.t);
    const Field* num[3] = {&s.u, &s.v, &s.w};
    for (int c = 0; c < 3; ++c) {
      double l2 = 0.0, li = 0.0;
      for (std::size_t k = 0; k < g.size(); ++k) {
        const double e = (*num[c])[k] - exact_fields[c][k];
        l2 += e * e;
        li = std::max(li, std::abs(e));
      }
      lev.err_l2[c] = std::sqrt(l2 * g.cell_volume());
      lev.err_linf[c] = li;
      if (li > 1e-12) exact = false;
    }
    if (weak) {
      const Identity ids[3] = {Identity::ForagerU, Identity::NutrientW, Identity::LogExploiterV};
      for (std::size_t k = 0; k < 5; ++k)
        for (int c = 0; c < 3; ++c)
          lev.weak_max[c] = std::max(lev.weak_max[c], std::abs(weak->value(k, ids[c])));
    }
    lev.seconds = std::chrono::duration<double>(clock::now() - t0).count();
    study.levels.push_back(lev);
  }
  study.exact = exact;
  for (std::size_t k = 0; k + 1 < study.levels.size(); ++k) {
    const MmsLevel& a = study.levels[k];
    const MmsLevel& b = study.levels[k + 1];
    std::array<double, 3> o2{}, oi{}, ow{};
    for (int c = 0; c < 3; ++c) {
      o2[c] = observed_order(a.err_l2[c], b.err_l2[c], a.h, b.h);
      oi[c] = observed_order(a.err_linf[c], b.err_linf[c], a.h, b.h);
      ow[c] = observed_order(a.weak_max[c], b.weak_max[c], a.h, b.h);
    }
    study.order_l2.push_back(o2);
    study.order_linf.push_back(oi);
    study.order_weak.push_back(ow);
  }
  study.seconds = std::chrono::duration<double>(clock::now() - start).count();
  return study;
}

bool strictly_decreasing(const std::vector<double>& x) {
  for (std::size_t k = 1; k < x.size(); ++k)
    if (!(x[k] < x[k - 1])) return false;
  return true;
}

EpsilonSweep sweep_epsilon(const Config& base, const std::vector<double>& eps) {
  if (eps.empty()) throw StructuralError("empty epsilon list");
  for (std::size_t k = 1; k < eps.size(); ++k)
    if (eps[k] > eps[k - 1]) throw StructuralError("epsilon list must be descending");
  validate_config(base);

  const Grid g = make_grid(base);
  const InitialData init = make_initial(base, g);
  const StepControl control = make_control(base);
  std::vector<ModelParams> params;
  std::vector<State> states;
  for (double e : eps) {
    Config c = base;
    c.epsilon = e;
    ModelParams p = make_params(c);
    validate(p);
    params.push_back(p);
    states.push_back(initial_state(init));
  }

  const std::size_t m = eps.size();
  EpsilonSweep out;
  out.eps = eps;
  out.t_end = base.t_end;
  const ModelParams& p0 = params.front();
  out.w_star = p0.mu > 0.0
                   ? norm_linf(init.w0) + p0.resupply.r_star(g.lx(), g.ly()) / p0.mu
                   : std::numeric_limits<double>::infinity();

  // running integrands at the previous time level
  std::vector<std::array<double, 3>> prev(m > 0 ? m - 1 : 0), acc(m > 0 ? m - 1 : 0);
  const double vol = g.cell_volume();
  auto integrands = [&](std::size_t k) {
    std::array<double, 3> r{};
    const State& a = states[k];
    const State& b = states[k + 1];
    for (std::size_t c = 0; c < g.size(); ++c) {
      const double du = a.u[c] - b.u[c], dv = a.v[c] - b.v[c], dw = a.w[c] - b.w[c];
      r[0] += du * du;
      r[1] += std::abs(dv);
      r[2] += dw * dw;
    }
    for (double& x : r) x *= vol;
    return r;
  };
  for (std::size_t k = 0; k + 1 < m; ++k) prev[k] = integrands(k);

  const double t_end = base.t_end;
  const double t_eps = 1e-12 * std::max(1.0, t_end);
  double t = 0.0;
  while (t < t_end - t_eps) {
    double dt = control.dt_max;
    if (control.adaptive)
      for (std::size_t k = 0; k < m; ++k)
        dt = std::min(dt, suggest_dt(states[k], params[k], g, control));
    if (t_end - t < dt * (1.0 + 1e-6)) dt = t_end - t;
    for (std::size_t k = 0; k < m; ++k) states[k] = step(states[k], params[k], dt, g, control);
    t += dt;
    out.steps += 1;
    for (std::size_t k = 0; k + 1 < m; ++k) {
      const auto cur = integrands(k);
      for (int c = 0; c < 3; ++c) acc[k][c] += 0.5 * dt * (prev[k][c] + cur[c]);
      prev[k] = cur;
    }
  }
  for (std::size_t k = 0; k + 1 < m; ++k) {
    out.diff_u.push_back(std::sqrt(acc[k][0]));
    out.diff_v.push_back(acc[k][1]);
    out.diff_w.push_back(std::sqrt(acc[k][2]));
  }
  return out;
}

} // namespace taxis
