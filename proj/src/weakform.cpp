#include "taxis/weakform.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <ostream>
#include <regex>

#include "taxis/errors.hpp"

namespace taxis {

// ---- factors ----

double SpatialFactor::value(double x, double y) const {
  if (constant) return 1.0;
  const double dx = x - cx, dy = y - cy;
  const double q = (dx * dx + dy * dy) / (radius * radius);
  if (q >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - q));
}

std::array<double, 2> SpatialFactor::gradient(double x, double y) const {
  if (constant) return {0.0, 0.0};
  const double dx = x - cx, dy = y - cy;
  const double r2 = radius * radius;
  const double q = (dx * dx + dy * dy) / r2;
  if (q >= 1.0) return {0.0, 0.0};
  const double om = 1.0 - q;
  const double psi = std::exp(1.0 - 1.0 / om);
  const double s = -psi / (om * om) * 2.0 / r2;
  return {s * dx, s * dy};
}

namespace {

// e^{-1/s} for s > 0
double edge(double s) { return s > 0.0 ? std::exp(-1.0 / s) : 0.0; }

} // namespace

double TemporalFactor::value(double t) const {
  if (kind == Kind::Bump) {
    if (t <= a || t >= b) return 0.0;
    const double s = (2.0 * t - a - b) / (b - a);
    return std::exp(1.0 - 1.0 / (1.0 - s * s));
  }
  if (t <= a) return 1.0;
  if (t >= b) return 0.0;
  const double s = (t - a) / (b - a);
  const double A = edge(1.0 - s), B = edge(s);
  return A / (A + B);
}

double TemporalFactor::derivative(double t) const {
  if (t <= a || t >= b) return 0.0;
  if (kind == Kind::Bump) {
    const double s = (2.0 * t - a - b) / (b - a);
    const double om = 1.0 - s * s;
    const double val = std::exp(1.0 - 1.0 / om);
    return val * (-2.0 * s / (om * om)) * (2.0 / (b - a));
  }
  const double s = (t - a) / (b - a);
  const double A = edge(1.0 - s), B = edge(s);
  const double dA = -A / ((1.0 - s) * (1.0 - s));
  const double dB = B / (s * s);
  const double den = A + B;
  return (dA * B - A * dB) / (den * den) / (b - a);
}

TestFunction TestFunction::separable(std::string name, SpatialFactor s, TemporalFactor t,
                                     double coefficient) {
  return TestFunction{std::move(name), {TestTerm{coefficient, s, t}}};
}

double TestFunction::value(double x, double y, double t) const {
  double s = 0.0;
  for (const TestTerm& m : terms) s += m.coefficient * m.space.value(x, y) * m.time.value(t);
  return s;
}

double TestFunction::time_derivative(double x, double y, double t) const {
  double s = 0.0;
  for (const TestTerm& m : terms) s += m.coefficient * m.space.value(x, y) * m.time.derivative(t);
  return s;
}

std::array<double, 2> TestFunction::gradient(double x, double y, double t) const {
  std::array<double, 2> g{0.0, 0.0};
  for (const TestTerm& m : terms) {
    const auto gs = m.space.gradient(x, y);
    const double c = m.coefficient * m.time.value(t);
    g[0] += c * gs[0];
    g[1] += c * gs[1];
  }
  return g;
}

double TestFunction::support_begin() const {
  double b = std::numeric_limits<double>::infinity();
  for (const TestTerm& m : terms) b = std::min(b, m.time.support_begin());
  return b;
}

double TestFunction::support_end() const {
  double e = -std::numeric_limits<double>::infinity();
  for (const TestTerm& m : terms) e = std::max(e, m.time.support_end());
  return e;
}

bool TestFunction::nonnegative() const {
  return std::all_of(terms.begin(), terms.end(),
                     [](const TestTerm& m) { return m.coefficient >= 0.0; });
}

TestFunction combine(double a, const TestFunction& phi1, double b, const TestFunction& phi2) {
  TestFunction out;
  out.name = phi1.name + "+" + phi2.name;
  for (TestTerm m : phi1.terms) {
    m.coefficient *= a;
    out.terms.push_back(m);
  }
  for (TestTerm m : phi2.terms) {
    m.coefficient *= b;
    out.terms.push_back(m);
  }
  return out;
}

std::vector<TestFunction> standard_basis(double t_end, double lx, double ly) {
  const double T = t_end;
  const double R = 0.3 * std::min(lx, ly);
  std::vector<TestFunction> out;
  out.push_back(TestFunction::separable("const_mid", SpatialFactor::one(),
                                        TemporalFactor::bump(0.2 * T, 0.8 * T)));
  out.push_back(TestFunction::separable("bump_sw_start",
                                        SpatialFactor::bump(0.35 * lx, 0.35 * ly, R),
                                        TemporalFactor::start(0.2 * T, 0.5 * T)));
  out.push_back(TestFunction::separable("bump_ne_start",
                                        SpatialFactor::bump(0.65 * lx, 0.6 * ly, R),
                                        TemporalFactor::start(0.2 * T, 0.5 * T)));
  out.push_back(TestFunction::separable("bump_nw_mid",
                                        SpatialFactor::bump(0.3 * lx, 0.65 * ly, R),
                                        TemporalFactor::bump(0.3 * T, 0.9 * T)));
  out.push_back(TestFunction::separable("bump_se_mid",
                                        SpatialFactor::bump(0.65 * lx, 0.3 * ly, R),
                                        TemporalFactor::bump(0.1 * T, 0.7 * T)));
  return out;
}

const char* identity_name(Identity id) {
  switch (id) {
  case Identity::ForagerU: return "residual_u";
  case Identity::NutrientW: return "residual_w";
  case Identity::LogExploiterV: return "defect_v";
  }
  return "?";
}

// ---- evaluator ----

WeakFormEvaluator::WeakFormEvaluator(const Grid& g, const ModelParams& params,
                                     std::vector<TestFunction> basis, Forcing forcing)
    : grid_(g), params_(params), basis_(std::move(basis)), forcing_(std::move(forcing)),
      sum_(basis_.size()), prev_(basis_.size()) {
  const std::size_t nx = g.nx(), ny = g.ny();
  spatial_.resize(basis_.size());
  for (std::size_t k = 0; k < basis_.size(); ++k) {
    for (const TestTerm& m : basis_[k].terms) {
      Spatial s;
      s.cell = sample(g, [&](double x, double y) { return m.space.value(x, y); });
      s.fx_val.resize((nx - 1) * ny);
      s.fx_grad.resize((nx - 1) * ny);
      s.fy_val.resize(nx * (ny - 1));
      s.fy_grad.resize(nx * (ny - 1));
      for (std::size_t j = 0; j < ny; ++j)
        for (std::size_t i = 0; i + 1 < nx; ++i) {
          const double x = static_cast<double>(i + 1) * g.hx(), y = g.y(j);
          s.fx_val[j * (nx - 1) + i] = m.space.value(x, y);
          s.fx_grad[j * (nx - 1) + i] = m.space.gradient(x, y)[0];
        }
      for (std::size_t j = 0; j + 1 < ny; ++j)
        for (std::size_t i = 0; i < nx; ++i) {
          const double x = g.x(i), y = static_cast<double>(j + 1) * g.hy();
          s.fy_val[j * nx + i] = m.space.value(x, y);
          s.fy_grad[j * nx + i] = m.space.gradient(x, y)[1];
        }
      spatial_[k].push_back(std::move(s));
    }
  }
  profile_ = sample(g, [&](double x, double y) { return params.resupply.profile_at(x, y); });
}

void WeakFormEvaluator::integrands(std::size_t k, double t, const Field& u, const Field& v,
                                   const Field& w, const Field& L, const Field* su, const Field* sv,
                                   const Field* sw, Accum& out) const {
  const Grid& g = grid_;
  const std::size_t nx = g.nx(), ny = g.ny(), n = g.size();
  const double vol = g.cell_volume();
  const KineticSpec& kin = params_.kinetics;
  const double rfac = params_.resupply.factor(t);
  out = Accum{};
  const TestFunction& phi = basis_[k];
  for (std::size_t m = 0; m < phi.terms.size(); ++m) {
    const TestTerm& term = phi.terms[m];
    const double tau = term.coefficient * term.time.value(t);
    const double dtau = term.coefficient * term.time.derivative(t);
    if (tau == 0.0 && dtau == 0.0) continue;
    const Spatial& s = spatial_[k][m];

    // cell sums
    double u0 = 0, u3 = 0, u4 = 0, v0 = 0, v5 = 0, v6 = 0, w0 = 0, w2 = 0, w4 = 0, w5 = 0;
    for (std::size_t c = 0; c < n; ++c) {
      const double p = s.cell[c];
      if (p == 0.0) continue;
      const double vc = v[c];
      u0 += u[c] * p;
      u3 += eval_law(kin.law_f, u[c]) * p;
      v0 += L[c] * p;
      v5 += eval_law(kin.law_g, vc) / (vc + 1.0) * p;
      w0 += w[c] * p;
      w2 += (u[c] + vc) * w[c] * p;
      w4 += profile_[c] * rfac * p;
      if (su) {
        u4 += (*su)[c] * p;
        v6 += (*sv)[c] / (vc + 1.0) * p;
        w5 += (*sw)[c] * p;
      }
    }
    // face sums
    double u1 = 0, u2 = 0, v1 = 0, v2 = 0, v3 = 0, v4 = 0, w1 = 0;
    auto face = [&](std::size_t a, std::size_t b, double h, double pv, double pg) {
      if (pv == 0.0 && pg == 0.0) return;
      const double du = (u[b] - u[a]) / h;
      const double dw = (w[b] - w[a]) / h;
      const double dL = (L[b] - L[a]) / h;
      const double uf = 0.5 * (u[a] + u[b]);
      const double vf = 0.5 * (v[a] + v[b]);
      const double vr = vf / (vf + 1.0);
      u1 += du * pg;
      u2 += uf * dw * pg;
      v1 += dL * dL * pv;
      v2 += dL * pg;
      v3 += vr * dL * du * pv;
      v4 += vr * du * pg;
      w1 += dw * pg;
    };
    for (std::size_t j = 0; j < ny; ++j)
      for (std::size_t i = 0; i + 1 < nx; ++i) {
        const std::size_t f = j * (nx - 1) + i;
        face(g.index(i, j), g.index(i + 1, j), g.hx(), s.fx_val[f], s.fx_grad[f]);
      }
    for (std::size_t j = 0; j + 1 < ny; ++j)
      for (std::size_t i = 0; i < nx; ++i) {
        const std::size_t f = j * nx + i;
        face(g.index(i, j), g.index(i, j + 1), g.hy(), s.fy_val[f], s.fy_grad[f]);
      }

    out.u[0] += -dtau * u0 * vol;
    out.u[1] += tau * u1 * vol;
    out.u[2] += -tau * u2 * vol;
    out.u[3] += -tau * u3 * vol;
    out.u[4] += -tau * u4 * vol;

    out.v[0] += -dtau * v0 * vol;
    out.v[1] += -tau * v1 * vol;
    out.v[2] += tau * v2 * vol;
    out.v[3] += tau * v3 * vol;
    out.v[4] += -tau * v4 * vol;
    out.v[5] += -tau * v5 * vol;
    out.v[6] += -tau * v6 * vol;

    out.w[0] += -dtau * w0 * vol;
    out.w[1] += tau * w1 * vol;
    out.w[2] += tau * w2 * vol;
    out.w[3] += tau * params_.mu * w0 * vol;
    out.w[4] += -tau * w4 * vol;
    out.w[5] += -tau * w5 * vol;
  }
}

void WeakFormEvaluator::add(double t, const Field& u, const Field& v, const Field& w) {
  require_conforming(u, grid_);
  require_conforming(v, grid_);
  require_conforming(w, grid_);
  if (nodes_ > 0 && !(t > t_last_))
    throw StructuralError("weak-form nodes must have strictly increasing times");

  Field su, sv, sw;
  const bool forced = static_cast<bool>(forcing_);
  if (forced) {
    su = Field(grid_);
    sv = Field(grid_);
    sw = Field(grid_);
    forcing_(t, su, sv, sw);
  }

  Field L(grid_);
  for (std::size_t c = 0; c < L.size(); ++c) L[c] = std::log1p(v[c]);

  const double dt = nodes_ > 0 ? t - t_last_ : 0.0;
  for (std::size_t k = 0; k < basis_.size(); ++k) {
    Accum cur;
    integrands(k, t, u, v, w, L, forced ? &su : nullptr, forced ? &sv : nullptr,
               forced ? &sw : nullptr, cur);
    Accum& s = sum_[k];
    if (nodes_ == 0) {
      if (t == 0.0) {
        // initial trace terms -int z0 phi(., 0)
        double iu = 0, iv = 0, iw = 0;
        const double vol = grid_.cell_volume();
        for (std::size_t m = 0; m < basis_[k].terms.size(); ++m) {
          const TestTerm& term = basis_[k].terms[m];
          const double tau0 = term.coefficient * term.time.value(0.0);
          if (tau0 == 0.0) continue;
          const Field& p = spatial_[k][m].cell;
          for (std::size_t c = 0; c < p.size(); ++c) {
            iu += tau0 * u[c] * p[c];
            iv += tau0 * L[c] * p[c];
            iw += tau0 * w[c] * p[c];
          }
        }
        s.u[kTermsU] = -iu * vol;
        s.v[kTermsV] = -iv * vol;
        s.w[kTermsW] = -iw * vol;
      }
    } else {
      for (std::size_t q = 0; q < kTermsU; ++q) s.u[q] += 0.5 * dt * (prev_[k].u[q] + cur.u[q]);
      for (std::size_t q = 0; q < kTermsV; ++q) s.v[q] += 0.5 * dt * (prev_[k].v[q] + cur.v[q]);
      for (std::size_t q = 0; q < kTermsW; ++q) s.w[q] += 0.5 * dt * (prev_[k].w[q] + cur.w[q]);
    }
    prev_[k] = cur;
  }

  double gsum = 0.0;
  for (double x : v.values()) gsum += eval_law(params_.kinetics.law_g, x);
  const double G = gsum * grid_.cell_volume();
  const double M = integrate(v, grid_);
  if (nodes_ == 0) {
    t_first_ = t;
    mass_v0_ = M;
  } else {
    g_cum_ += 0.5 * dt * (g_prev_ + G);
    dt_max_ = std::max(dt_max_, dt);
  }
  g_prev_ = G;
  slack_.push_back({t, mass_v0_ + g_cum_ - M});
  t_last_ = t;
  ++nodes_;
}

namespace {

template <std::size_t N>
double total(const std::array<double, N>& a) {
  double s = 0.0;
  for (double x : a) s += x;
  return s;
}

template <std::size_t N>
double abs_total(const std::array<double, N>& a) {
  double s = 0.0;
  for (double x : a) s += std::abs(x);
  return s;
}

} // namespace

double WeakFormEvaluator::value(std::size_t k, Identity id) const {
  if (k >= basis_.size()) throw StructuralError("test function index out of range");
  const TestFunction& phi = basis_[k];
  if (phi.empty() || nodes_ == 0) return 0.0;
  const double b = phi.support_begin(), e = phi.support_end();
  const double slack = 1e-12 * std::max(1.0, std::abs(t_last_));
  if (e <= t_first_ || b >= t_last_) return 0.0;
  if (b < t_first_ - slack || e > t_last_ + slack)
    throw StructuralError("test function '" + phi.name + "' has support [" + std::to_string(b) +
                          ", " + std::to_string(e) + "] outside the recorded times [" +
                          std::to_string(t_first_) + ", " + std::to_string(t_last_) + "]");
  const Accum& s = sum_[k];
  switch (id) {
  case Identity::ForagerU: return total(s.u);
  case Identity::NutrientW: return total(s.w);
  case Identity::LogExploiterV: return total(s.v);
  }
  return 0.0;
}

std::vector<WeakResult> WeakFormEvaluator::results() const {
  std::vector<WeakResult> out;
  const double h = std::max(grid_.hx(), grid_.hy());
  for (std::size_t k = 0; k < basis_.size(); ++k) {
    const TestFunction& phi = basis_[k];
    const bool vacuous = nodes_ == 0 || phi.support_end() <= t_first_ ||
                         phi.support_begin() >= t_last_;
    for (Identity id : {Identity::ForagerU, Identity::NutrientW, Identity::LogExploiterV}) {
      if (id == Identity::LogExploiterV && !phi.nonnegative()) continue;
      WeakResult r;
      r.test_fn = phi.name;
      r.identity = identity_name(id);
      r.value = value(k, id);
      r.vacuous = vacuous;
      const Accum& s = sum_[k];
      const double mag = id == Identity::ForagerU    ? abs_total(s.u)
                         : id == Identity::NutrientW ? abs_total(s.w)
                                                     : abs_total(s.v);
      r.budget = vacuous ? 0.0 : 1e-6 + (h + dt_max_) * mag;
      r.pass = id == Identity::LogExploiterV ? r.value >= -r.budget
                                             : std::abs(r.value) <= r.budget;
      out.push_back(r);
    }
  }
  return out;
}

double WeakFormEvaluator::min_mass_slack() const {
  double m = std::numeric_limits<double>::infinity();
  for (const MassSlackSample& s : slack_) m = std::min(m, s.slack);
  return slack_.empty() ? 0.0 : m;
}

// ---- trajectories ----

TrajectoryHandle TrajectoryHandle::open(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw StructuralError("no trajectory directory " + dir.string());
  static const std::regex pattern(R"(u_(\d{8})\.fld)");
  std::map<std::uint64_t, fs::path> steps;
  for (const auto& entry : fs::directory_iterator(dir)) {
    std::smatch m;
    const std::string name = entry.path().filename().string();
    if (std::regex_match(name, m, pattern)) steps[std::stoull(m[1].str())] = entry.path();
  }
  if (steps.empty()) throw StructuralError("no snapshots in " + dir.string());

  std::optional<TrajectoryHandle> handle;
  for (const auto& [step, upath] : steps) {
    char suffix[32];
    std::snprintf(suffix, sizeof suffix, "_%08llu.fld", static_cast<unsigned long long>(step));
    TrajectoryEntry e;
    e.step = step;
    e.u = upath;
    e.v = dir / (std::string("v") + suffix);
    e.w = dir / (std::string("w") + suffix);
    if (!fs::exists(e.v) || !fs::exists(e.w))
      throw StructuralError("snapshot step " + std::to_string(step) + " lacks v or w");
    const Snapshot s = read_fld(e.u);
    e.t = s.t;
    if (!handle) handle.emplace(TrajectoryHandle(s.grid));
    if (!(s.grid == handle->grid_)) throw StructuralError("snapshot grids do not conform");
    if (!handle->entries_.empty() && !(e.t > handle->entries_.back().t))
      throw StructuralError("snapshot times must increase strictly");
    handle->entries_.push_back(std::move(e));
  }
  return std::move(*handle);
}

State TrajectoryHandle::load(std::size_t k) const {
  const TrajectoryEntry& e = entries_.at(k);
  Snapshot su = read_fld(e.u), sv = read_fld(e.v), sw = read_fld(e.w);
  if (!(su.grid == grid_) || !(sv.grid == grid_) || !(sw.grid == grid_))
    throw StructuralError("snapshot grids do not conform");
  return State{std::move(su.values), std::move(sv.values), std::move(sw.values), e.t, e.step};
}

void TrajectoryHandle::stream(WeakFormEvaluator& eval) const {
  for (std::size_t k = 0; k < entries_.size(); ++k) {
    const State s = load(k);
    eval.add(s.t, s.u, s.v, s.w);
  }
}

namespace {

double single(const TrajectoryHandle& traj, const TestFunction& phi, const ModelParams& params,
              Identity id) {
  WeakFormEvaluator eval(traj.grid(), params, {phi});
  traj.stream(eval);
  return eval.value(0, id);
}

} // namespace

double residual_u(const TrajectoryHandle& traj, const TestFunction& phi, const ModelParams& params) {
  return single(traj, phi, params, Identity::ForagerU);
}

double residual_w(const TrajectoryHandle& traj, const TestFunction& phi, const ModelParams& params) {
  return single(traj, phi, params, Identity::NutrientW);
}

double defect_v(const TrajectoryHandle& traj, const TestFunction& psi, const ModelParams& params) {
  if (!psi.nonnegative()) throw DomainError("defect_v needs a nonnegative test function");
  return single(traj, psi, params, Identity::LogExploiterV);
}

std::vector<MassSlackSample> check_mass_inequality(const TrajectoryHandle& traj,
                                                   const ModelParams& params) {
  WeakFormEvaluator eval(traj.grid(), params, {});
  traj.stream(eval);
  return eval.mass_slack();
}

void write_weakform_csv(std::ostream& os, const std::vector<WeakResult>& rows, double min_slack) {
  char buf[128];
  os << "test_fn,identity,value,budget,pass\n";
  for (const WeakResult& r : rows) {
    std::snprintf(buf, sizeof buf, "%.10g,%.6g,%s", r.value, r.budget, r.pass ? "true" : "false");
    os << r.test_fn << ',' << r.identity << ',' << buf << '\n';
  }
  const bool ok = min_slack >= -kMassSlackTolerance;
  std::snprintf(buf, sizeof buf, "%.10g,%.6g,%s", min_slack, kMassSlackTolerance,
                ok ? "true" : "false");
  os << "-,mass_inequality," << buf << '\n';
}

} // namespace taxis
