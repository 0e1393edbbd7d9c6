#include "taxis/monitors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "taxis/errors.hpp"

namespace taxis {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Integer exponents are common (alpha = beta = 3, q = 2, p = 4).
inline double power(double x, double p) {
  if (p == 2.0) return x * x;
  if (p == 3.0) return x * x * x;
  if (p == 4.0) {
    const double x2 = x * x;
    return x2 * x2;
  }
  return std::pow(x, p);
}

double integral_of_power(const Field& f, const Grid& g, double p) {
  double s = 0.0;
  for (double v : f.values()) s += power(v, p);
  return s * g.cell_volume();
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

} // namespace

double mass_ode_star(double alpha, double K, double L, double omega_vol, double y0) {
  if (!(alpha > 1.0) || !(K > 0.0) || !(L >= 0.0) || !(omega_vol > 0.0) || !(y0 >= 0.0))
    throw DomainError("mass_ode_star needs alpha > 1, K > 0, L >= 0, |Omega| > 0, y0 >= 0");
  return std::max(y0, omega_vol * std::pow(L / K, 1.0 / alpha));
}

double comparison_ode_bound(double y0, double a, double C) {
  if (!(a > 0.0)) throw DomainError("comparison_ode_bound needs a > 0");
  if (!(C >= 0.0) || !(y0 >= 0.0)) throw DomainError("comparison_ode_bound needs C, y0 >= 0");
  return y0 + C / (-std::expm1(-a));
}

BoundConstants bound_constants(const KineticSpec& kin, double mu, double r_star, double omega_vol,
                               double mass_u0, double mass_v0, double w0_sup) {
  BoundConstants c;
  c.u_star = mass_ode_star(kin.alpha(), kin.env_f.K, kin.env_f.L, omega_vol, mass_u0);
  c.v_star = mass_ode_star(kin.beta(), kin.env_g.K, kin.env_g.L, omega_vol, mass_v0);
  c.w_star = mu > 0.0 ? w0_sup + r_star / mu : kInf;
  c.window_alpha_bound = kin.env_f.L * omega_vol / kin.env_f.K + c.u_star / kin.env_f.K;
  c.window_beta_bound = kin.env_g.L * omega_vol / kin.env_g.K + c.v_star / kin.env_g.K;
  return c;
}

BoundConstants bound_constants(const ModelParams& params, const Grid& g, const InitialData& init) {
  return bound_constants(params.kinetics, params.mu, params.resupply.r_star(g.lx(), g.ly()),
                         g.area(), integrate(init.u0, g), integrate(init.v0, g),
                         norm_linf(init.w0));
}

const char* verdict_name(Verdict v) {
  switch (v) {
  case Verdict::Pass: return "pass";
  case Verdict::Fail: return "fail";
  case Verdict::Report: return "report";
  case Verdict::Skipped: return "skipped";
  }
  return "?";
}

MonitorEntry upper_bound_entry(double t, std::string name, double value, double bound,
                               double tolerance) {
  MonitorEntry e;
  e.t = t;
  e.name = std::move(name);
  e.value = value;
  e.bound = bound;
  e.margin = bound - value;
  e.tolerance = tolerance;
  e.verdict = e.margin >= -tolerance ? Verdict::Pass : Verdict::Fail;
  return e;
}

double default_tolerance(double bound, double dt) {
  return 1e-6 + 10.0 * dt * (std::isfinite(bound) ? std::abs(bound) : 0.0);
}

std::array<MonitorEntry, 2> check_mass(const State& state, const Grid& g,
                                       const BoundConstants& consts, double dt) {
  // Relative 1e-6 plus the first-order overshoot 10 dt, both scaled by the bound.
  const double tol_u = (1e-6 + 10.0 * dt) * consts.u_star;
  const double tol_v = (1e-6 + 10.0 * dt) * consts.v_star;
  return {upper_bound_entry(state.t, "mass_u", integrate(state.u, g), consts.u_star, tol_u),
          upper_bound_entry(state.t, "mass_v", integrate(state.v, g), consts.v_star, tol_v)};
}

// ---- supersolution ----

SupersolutionTracker::SupersolutionTracker(double w0_sup, double mu, double r_sup0, double t0)
    : mu_(mu), wbar_(w0_sup), t_(t0), r_last_(r_sup0) {}

double SupersolutionTracker::step_integral(double mu, double dt, double r0, double r1) {
  if (dt <= 0.0) return 0.0;
  if (r0 > 0.0 && r1 > 0.0) {
    // R(s) = r0 exp(kappa s): integral = r0 e^{-mu dt} (e^{(mu+kappa) dt} - 1)/(mu + kappa).
    const double kappa = std::log(r1 / r0) / dt;
    const double rate = mu + kappa;
    const double x = rate * dt;
    const double growth = std::abs(x) < 1e-8 ? dt * (1.0 + 0.5 * x) : std::expm1(x) / rate;
    return r0 * std::exp(-mu * dt) * growth;
  }
  // Linear R(s) = r0 + (r1 - r0) s / dt against the exact kernel.
  const double x = mu * dt;
  if (x < 1e-8) return 0.5 * dt * (r0 + r1);
  const double e = std::exp(-x);
  // int_0^dt e^{-mu (dt - s)} ds = (1 - e)/mu ; int s e^{-mu(dt-s)} ds / dt = ...
  const double w_const = (1.0 - e) / mu;
  const double w_lin = (dt - w_const) / x; // int_0^dt (s/dt) e^{-mu(dt-s)} ds
  return r0 * (w_const - w_lin) + r1 * w_lin;
}

void SupersolutionTracker::advance(double t_new, double r_sup_new) {
  const double dt = t_new - t_;
  wbar_ = wbar_ * std::exp(-mu_ * dt) + step_integral(mu_, dt, r_last_, r_sup_new);
  t_ = t_new;
  r_last_ = r_sup_new;
}

std::vector<MonitorEntry> check_w_supersolution(const State& state,
                                                const SupersolutionTracker& wbar,
                                                const BoundConstants& consts, double mu,
                                                double dt) {
  const double w_sup = norm_linf(state.w);
  std::vector<MonitorEntry> out;
  out.push_back(
      upper_bound_entry(state.t, "w_supersolution", w_sup, wbar.value(), 1e-6 + 10.0 * dt));
  if (mu > 0.0) out.push_back(upper_bound_entry(state.t, "w_ceiling", w_sup, consts.w_star, 1e-6));
  return out;
}

// ---- windows ----

WindowBuffer::WindowBuffer(std::vector<std::string> series)
    : names_(std::move(series)), cum_(names_.size()), last_(names_.size(), 0.0),
      history_(names_.size()) {}

std::size_t WindowBuffer::index_of(const std::string& name) const {
  const auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) throw StructuralError("no window series named '" + name + "'");
  return static_cast<std::size_t>(it - names_.begin());
}

void WindowBuffer::push(double t, std::span<const double> values) {
  if (values.size() != names_.size())
    throw StructuralError("window push with " + std::to_string(values.size()) + " values, expected " +
                          std::to_string(names_.size()));
  if (t_.empty()) {
    t0_ = t;
    t_.push_back(t);
    for (std::size_t s = 0; s < names_.size(); ++s) {
      cum_[s].push_back(0.0);
      last_[s] = values[s];
      history_[s].emplace_back(t, 0.0);
    }
    return;
  }
  const double dt = t - t_.back();
  if (!(dt >= 0.0)) throw StructuralError("window times must be nondecreasing");
  t_.push_back(t);
  for (std::size_t s = 0; s < names_.size(); ++s) {
    const double c = cum_[s].back() + 0.5 * dt * (last_[s] + values[s]);
    cum_[s].push_back(c);
    last_[s] = values[s];
    history_[s].emplace_back(t, c);
  }
  // Keep a little more than one unit of history for the sliding window.
  while (head_ + 1 < t_.size() && t_[head_ + 1] < t - 1.5) ++head_;
  if (head_ > 4096 && 2 * head_ > t_.size()) compact();
}

void WindowBuffer::compact() {
  t_.erase(t_.begin(), t_.begin() + static_cast<std::ptrdiff_t>(head_));
  for (auto& c : cum_) c.erase(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(head_));
  head_ = 0;
}

double WindowBuffer::cumulative_at(std::size_t series, double t) const {
  const auto& c = cum_[series];
  const auto begin = t_.begin() + static_cast<std::ptrdiff_t>(head_);
  if (t <= *begin) return c[head_];
  if (t >= t_.back()) return c.back();
  const auto it = std::upper_bound(begin, t_.end(), t);
  const std::size_t hi = static_cast<std::size_t>(it - t_.begin());
  const std::size_t lo = hi - 1;
  const double span = t_[hi] - t_[lo];
  const double w = span > 0.0 ? (t - t_[lo]) / span : 1.0;
  return c[lo] + w * (c[hi] - c[lo]);
}

double WindowBuffer::integral(std::size_t series, double t0, double t1) const {
  if (t_.empty()) return 0.0;
  return cumulative_at(series, t1) - cumulative_at(series, t0);
}

double WindowBuffer::cumulative(std::size_t series) const {
  return cum_[series].empty() ? 0.0 : cum_[series].back();
}

std::array<MonitorEntry, 2> check_window_integrals(const WindowBuffer& buf,
                                                   const BoundConstants& consts, double dt) {
  const std::size_t iu = buf.index_of("u_alpha");
  const std::size_t iv = buf.index_of("v_beta");
  const double t = buf.t_last();
  std::array<MonitorEntry, 2> out;
  if (buf.empty() || t - buf.t_first() < 1.0 - 1e-12) {
    for (int k = 0; k < 2; ++k) {
      out[k].t = t;
      out[k].name = k == 0 ? "window_u_alpha" : "window_v_beta";
      out[k].bound = k == 0 ? consts.window_alpha_bound : consts.window_beta_bound;
      out[k].value = kNaN;
      out[k].margin = kNaN;
      out[k].verdict = Verdict::Skipped;
      out[k].note = "insufficient window";
    }
    return out;
  }
  const double t0 = t - 1.0;
  out[0] = upper_bound_entry(t, "window_u_alpha", buf.integral(iu, t0, t), consts.window_alpha_bound,
                             default_tolerance(consts.window_alpha_bound, dt));
  out[1] = upper_bound_entry(t, "window_v_beta", buf.integral(iv, t0, t), consts.window_beta_bound,
                             default_tolerance(consts.window_beta_bound, dt));
  out[0].window_start = t0;
  out[1].window_start = t0;
  return out;
}

// ---- v mass identity ----

VMassLedger::VMassLedger(double t0, double mass_v0, double g_integral0)
    : t_(t0), mass_v0_(mass_v0), mass_v_(mass_v0), g_last_(g_integral0) {}

void VMassLedger::push(double t, double mass_v, double g_integral) {
  const double dt = t - t_;
  g_cumulative_ += 0.5 * dt * (g_last_ + g_integral);
  g_abs_cumulative_ += 0.5 * dt * (std::abs(g_last_) + std::abs(g_integral));
  g_last_ = g_integral;
  mass_v_ = mass_v;
  t_ = t;
}

double VMassLedger::relative_residual() const noexcept {
  const double scale = throughput();
  return scale > 0.0 ? std::abs(residual()) / scale : std::abs(residual());
}

MonitorEntry check_v_mass_identity(const VMassLedger& ledger, double dt) {
  MonitorEntry e = upper_bound_entry(ledger.time(), "v_mass_identity", ledger.relative_residual(),
                                     1e-6 + 10.0 * dt, 0.0);
  e.note = "residual=" + fmt(ledger.residual());
  return e;
}

LinearFit least_squares(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = std::min(x.size(), y.size());
  LinearFit fit;
  if (n == 0) return fit;
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    mx += x[k];
    my += y[k];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    sxx += (x[k] - mx) * (x[k] - mx);
    sxy += (x[k] - mx) * (y[k] - my);
  }
  fit.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  fit.intercept = my - fit.slope * mx;
  return fit;
}

MonitorEntry check_log_gradient_energy(const WindowBuffer& buf) {
  const std::size_t idx = buf.index_of("log_grad");
  const auto& hist = buf.history(idx);
  std::vector<double> ts, cs;
  ts.reserve(hist.size());
  cs.reserve(hist.size());
  for (const auto& [t, c] : hist) {
    ts.push_back(t);
    cs.push_back(c);
  }
  const LinearFit fit = least_squares(ts, cs);
  MonitorEntry e;
  e.t = buf.t_last();
  e.name = "log_gradient_energy";
  e.value = buf.cumulative(idx);
  e.bound = fit.intercept + fit.slope * e.t;
  e.margin = e.bound - e.value;
  e.verdict = Verdict::Report;
  e.note = "slope=" + fmt(fit.slope);
  return e;
}

// ---- decay ----

DecayResult detect_w_decay(std::span<const DecaySample> traj, double delta, bool hypotheses_met) {
  DecayResult r;
  r.hypotheses_met = hypotheses_met;
  if (traj.empty()) return r;
  // Walk backwards to the earliest index from which every sample stays below delta.
  std::size_t first = traj.size();
  while (first > 0 && traj[first - 1].w_sup < delta) --first;
  if (first == traj.size()) return r;
  r.detected = true;
  r.t_detect = traj[first].t;
  for (std::size_t k = first + 1; k < traj.size(); ++k) {
    const double dt = traj[k].t - traj[k - 1].t;
    r.tail_w += 0.5 * dt * (traj[k].w_integral + traj[k - 1].w_integral);
    r.tail_consumption +=
        0.5 * dt * (traj[k].consumption_integral + traj[k - 1].consumption_integral);
  }
  return r;
}

// ---- weighted functional ----

FunctionalParams pick_theta_delta(double q) {
  if (!(q > 1.0)) throw DomainError("pick_theta_delta needs q > 1");
  FunctionalParams fp;
  fp.q = q;
  const double poly = q + 2.0 * q * (q - 1.0) + q * (q - 1.0) * (q - 1.0);
  const double ceiling = 2.0 * (q - 1.0) / (4.0 * poly);
  fp.theta = 0.5 * ceiling;
  const double cap = std::min({1.0, fp.theta, 1.0 / (4.0 * q)});
  fp.delta = 0.5 * cap;
  fp.theta_margin = 2.0 * (q - 1.0) - 4.0 * poly * fp.theta;
  fp.delta_margin = cap - fp.delta;
  const double num = 2.0 * q * fp.theta + 2.0 * q * (q - 1.0) * fp.delta;
  const double den = 4.0 * (fp.theta * (fp.theta + 1.0) - 2.0 * q * fp.theta * fp.delta);
  fp.quotient = num * num / den;
  fp.quotient_margin = q * (q - 1.0) - fp.quotient;
  if (!(fp.theta_margin > 0.0 && fp.delta_margin > 0.0 && fp.quotient_margin > 0.0 && den > 0.0))
    throw DomainError("theta/delta construction failed for q = " + fmt(q));
  return fp;
}

std::optional<double> weighted_functional(const State& state, const Grid& g,
                                          const FunctionalParams& fp) {
  require_conforming(state.u, g);
  require_conforming(state.w, g);
  if (!(norm_linf(state.w) < fp.delta)) return std::nullopt;
  double s = 0.0;
  for (std::size_t k = 0; k < state.u.size(); ++k)
    s += power(state.u[k], fp.q) / std::pow(2.0 * fp.delta - state.w[k], fp.theta);
  return s * g.cell_volume();
}

// ---- regularity ----

RegularityReport eventual_regularity_report(std::span<const RegularitySample> traj,
                                            double t_detect, double tol_slope) {
  RegularityReport rep;
  rep.t_from = t_detect + 1.0;
  using Getter = double (*)(const RegularitySample&);
  const std::pair<const char*, Getter> quantities[] = {
      {"u_sup", [](const RegularitySample& s) { return s.u_sup; }},
      {"v_sup", [](const RegularitySample& s) { return s.v_sup; }},
      {"grad_u_sup", [](const RegularitySample& s) { return s.grad_u; }},
      {"grad_v_sup", [](const RegularitySample& s) { return s.grad_v; }},
      {"grad_w_sup", [](const RegularitySample& s) { return s.grad_w; }},
      {"w2p_u", [](const RegularitySample& s) { return s.w2p_u; }},
      {"weighted_functional", [](const RegularitySample& s) { return s.functional; }},
  };
  bool all_ok = true;
  bool any = false;
  for (const auto& [name, get] : quantities) {
    std::vector<double> ts, ys;
    RegularityQuantity q;
    q.name = name;
    for (const RegularitySample& s : traj) {
      if (s.t <= rep.t_from) continue;
      const double y = get(s);
      if (!std::isfinite(y)) continue;
      ts.push_back(s.t);
      ys.push_back(y);
      q.sup = std::max(q.sup, y);
    }
    q.samples = ts.size();
    q.slope = least_squares(ts, ys).slope;
    if (q.samples >= 2) {
      any = true;
      if (!(q.slope <= tol_slope)) all_ok = false;
    } else if (std::string(name) == "u_sup") {
      all_ok = false;
    }
    rep.quantities.push_back(q);
  }
  rep.evaluated = any;
  rep.regularized = any && all_ok;
  return rep;
}

// ---- suite ----

bool SuiteReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const auto& kv) { return kv.second.failures == 0; });
}

namespace {

const std::vector<std::string> kWindowSeries = {"u_alpha", "v_beta", "log_grad", "grad_w_2rho",
                                                "u_q"};

} // namespace

MonitorSuite::MonitorSuite(const Grid& g, const ModelParams& params, const InitialData& init,
                           MonitorSettings settings)
    : grid_(g), params_(params), settings_(settings), consts_(bound_constants(params, g, init)),
      fp_(pick_theta_delta(settings.q)),
      wbar_(norm_linf(init.w0), params.mu, params.resupply.sup_at(0.0, g.lx(), g.ly())),
      window_(kWindowSeries), ledger_(0.0, integrate(init.v0, g), 0.0) {
  double g0 = 0.0;
  for (double v : init.v0.values()) g0 += eval_law(params.kinetics.law_g, v);
  ledger_ = VMassLedger(0.0, integrate(init.v0, g), g0 * g.cell_volume());
}

void MonitorSuite::record(const MonitorEntry& e) {
  CheckSummary& s = summary_[e.name];
  s.evaluations += 1;
  s.last_value = e.value;
  if (e.verdict == Verdict::Pass || e.verdict == Verdict::Fail) {
    if (e.verdict == Verdict::Fail) s.failures += 1;
    if (e.margin < s.worst_margin) {
      s.worst_margin = e.margin;
      s.worst_t = e.t;
    }
  }
}

std::vector<MonitorEntry> MonitorSuite::observe(const State& state, double dt) {
  const Grid& g = grid_;
  const double vol = g.cell_volume();
  const KineticSpec& kin = params_.kinetics;
  max_dt_ = std::max(max_dt_, dt);

  if (started_) {
    wbar_.advance(state.t, params_.resupply.sup_at(state.t, g.lx(), g.ly()));
    double gsum = 0.0;
    for (double v : state.v.values()) gsum += eval_law(kin.law_g, v);
    ledger_.push(state.t, integrate(state.v, g), gsum * vol);
  }
  started_ = true;

  const double rho = kin.rho();
  const double values[] = {integral_of_power(state.u, g, kin.alpha()),
                           integral_of_power(state.v, g, kin.beta()),
                           log_gradient_energy(state.v, g),
                           gradient_power_integral(state.w, g, 2.0 * rho),
                           integral_of_power(state.u, g, settings_.q)};
  window_.push(state.t, values);

  std::vector<MonitorEntry> out;
  for (const MonitorEntry& e : check_mass(state, g, consts_, max_dt_)) out.push_back(e);
  for (MonitorEntry& e : check_w_supersolution(state, wbar_, consts_, params_.mu, max_dt_))
    out.push_back(std::move(e));
  for (const MonitorEntry& e : check_window_integrals(window_, consts_, max_dt_)) out.push_back(e);
  out.push_back(check_v_mass_identity(ledger_, max_dt_));
  max_rel_residual_ = std::max(max_rel_residual_, ledger_.relative_residual());
  out.push_back(check_log_gradient_energy(window_));

  // Report-only series without explicit constants.
  auto report = [&](const char* name, double value, std::optional<double> start = {}) {
    MonitorEntry e;
    e.t = state.t;
    e.name = name;
    e.value = value;
    e.bound = kInf;
    e.margin = kInf;
    e.verdict = Verdict::Report;
    e.window_start = start;
    out.push_back(std::move(e));
  };
  const bool full_window = state.t - window_.t_first() >= 1.0 - 1e-12;
  if (full_window) {
    const double t0 = state.t - 1.0;
    report("window_grad_w_2rho", window_.integral(window_.index_of("grad_w_2rho"), t0, state.t), t0);
    report("window_u_q", window_.integral(window_.index_of("u_q"), t0, state.t), t0);
  }
  report("w2p_w", seminorm_w2p(state.w, g, rho));

  // Consumption integral uses the regularized rate actually integrated.
  double cons = 0.0;
  for (std::size_t k = 0; k < state.w.size(); ++k)
    cons += consumption_rate(state.u[k], state.v[k], state.w[k], params_.epsilon) * state.w[k];
  const double w_sup = norm_linf(state.w);
  decay_.push_back(DecaySample{state.t, w_sup, integrate(state.w, g), cons * vol});

  if (settings_.decay_armed) {
    RegularitySample s;
    s.t = state.t;
    s.u_sup = norm_linf(state.u);
    s.v_sup = norm_linf(state.v);
    s.grad_u = max_face_gradient(state.u, g);
    s.grad_v = max_face_gradient(state.v, g);
    s.grad_w = max_face_gradient(state.w, g);
    s.w2p_u = seminorm_w2p(state.u, g, 4.0);
    const auto fv = weighted_functional(state, g, fp_);
    s.functional = fv ? *fv : kNaN;
    regularity_.push_back(s);
    if (fv) report("weighted_functional", *fv);
  }

  for (const MonitorEntry& e : out) record(e);
  return out;
}

SuiteReport MonitorSuite::finish() const {
  SuiteReport rep;
  rep.checks = summary_;
  rep.decay = detect_w_decay(decay_, settings_.delta, settings_.decay_armed);
  if (settings_.decay_armed && rep.decay.detected)
    rep.regularity = eventual_regularity_report(regularity_, rep.decay.t_detect);
  std::vector<double> ts, cs;
  for (const auto& [t, c] : window_.history(window_.index_of("log_grad"))) {
    ts.push_back(t);
    cs.push_back(c);
  }
  rep.log_gradient_fit = least_squares(ts, cs);
  rep.max_v_mass_relative_residual = max_rel_residual_;
  return rep;
}

} // namespace taxis
