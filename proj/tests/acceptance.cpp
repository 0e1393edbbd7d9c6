// Runs the acceptance criteria and prints one PASS/FAIL line per criterion.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "taxis/monitors.hpp"
#include "taxis/presets.hpp"
#include "taxis/run.hpp"
#include "taxis/studies.hpp"

using namespace taxis;

namespace {

int failures = 0;

void verdict(int id, bool pass, const std::string& what, const std::string& detail) {
  std::printf("%s criterion %d: %s (%s)\n", pass ? "PASS" : "FAIL", id, what.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::uint64_t failures_of(const RunResult& r, const std::string& check) {
  const auto it = r.report.checks.find(check);
  return it == r.report.checks.end() ? 0 : it->second.failures;
}

bool evaluated(const RunResult& r, const std::string& check) {
  const auto it = r.report.checks.find(check);
  return it != r.report.checks.end() && it->second.evaluations > 0;
}

struct PresetRun {
  Preset preset;
  RunResult result;
};

std::map<std::string, PresetRun> run_presets() {
  std::map<std::string, PresetRun> out;
  for (const std::string& name : preset_names()) {
    const auto t0 = std::chrono::steady_clock::now();
    PresetRun pr{preset(name), {}};
    RunOptions opt;
    opt.write_outputs = false;
    opt.force = !pr.preset.expect_gate1;
    pr.result = run(pr.preset.config, opt);
    std::printf("  ran %s: %s, %llu steps, %.1f s\n", name.c_str(), status_name(pr.result.status),
                static_cast<unsigned long long>(pr.result.steps), seconds_since(t0));
    std::fflush(stdout);
    out.emplace(name, std::move(pr));
  }
  return out;
}

// ---- criterion 1 ----

void mms_convergence() {
  MmsOptions opt;
  opt.triple = "cosine";
  opt.levels = {32, 64, 128};
  const MmsStudy s = run_mms(opt);
  bool ok = !s.exact && s.seconds < 120.0;
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& o : s.order_l2)
    for (double x : o) worst = std::min(worst, x);
  ok = ok && worst >= 1.8;
  verdict(1, ok, "manufactured-solution L2 order >= 1.8 on 32/64/128 in under 2 min",
          "min order " + fmt("%.3f", worst) + ", " + fmt("%.1f s", s.seconds));
}

// ---- criterion 2 ----

void mass_bounds(const std::map<std::string, PresetRun>& runs) {
  bool ok = true;
  std::string detail;
  for (const char* name : {"thm1-core", "allee"}) {
    const RunResult& r = runs.at(name).result;
    const bool this_ok = r.status == RunStatus::Completed && r.final_state.t == 20.0 &&
                         evaluated(r, "mass_u") && failures_of(r, "mass_u") == 0 &&
                         failures_of(r, "mass_v") == 0;
    ok = ok && this_ok;
    detail += std::string(name) + ": worst margins u " +
              fmt("%.3g", r.report.checks.at("mass_u").worst_margin) + " v " +
              fmt("%.3g", r.report.checks.at("mass_v").worst_margin) + "; ";
  }
  verdict(2, ok, "mass bounds at every step on thm1-core and allee over [0, 20]", detail);
}

// ---- criterion 3 ----

void supersolution(const std::map<std::string, PresetRun>& runs) {
  bool ok = true;
  int with_mu = 0;
  std::string detail;
  for (const auto& [name, pr] : runs) {
    if (!(pr.preset.config.mu > 0.0)) continue;
    ++with_mu;
    const RunResult& r = pr.result;
    ok = ok && r.status == RunStatus::Completed && evaluated(r, "w_supersolution") &&
         evaluated(r, "w_ceiling") && failures_of(r, "w_supersolution") == 0 &&
         failures_of(r, "w_ceiling") == 0;
    detail += name + ": worst margins wbar " +
              fmt("%.3g", r.report.checks.at("w_supersolution").worst_margin) + " w* " +
              fmt("%.3g", r.report.checks.at("w_ceiling").worst_margin) + "; ";
  }
  ok = ok && with_mu > 0;
  verdict(3, ok, "nutrient below the supersolution and the ceiling on presets with mu > 0", detail);
}

// ---- criterion 4 ----

void v_mass_identity() {
  auto fixed = [](double dt) {
    Config c = preset("thm1-core").config;
    c.adaptive = false;
    c.dt_max = dt;
    RunOptions opt;
    opt.write_outputs = false;
    opt.weak_form = false;
    return run(c, opt);
  };
  const RunResult a = fixed(1e-3);
  const RunResult b = fixed(5e-4);
  const double ra = a.report.max_v_mass_relative_residual;
  const double rb = b.report.max_v_mass_relative_residual;
  const double ratio = rb > 0.0 ? ra / rb : 0.0;
  const bool ok = a.status == RunStatus::Completed && b.status == RunStatus::Completed &&
                  ra <= 1e-3 && ratio >= 1.7 && ratio <= 2.3;
  verdict(4, ok, "v-mass identity residual <= 1e-3 at dt = 1e-3 and first order in dt",
          "residual " + fmt("%.3g", ra) + " / " + fmt("%.3g", rb) + ", ratio " + fmt("%.3f", ratio));
}

// ---- criterion 5 ----

void nutrient_decay(const std::map<std::string, PresetRun>& runs) {
  const RunResult& r = runs.at("thm2-decay").result;
  const DecayResult& d = r.report.decay;
  const double tail = d.tail_w + d.tail_consumption;
  const bool ok = r.status == RunStatus::Completed && d.hypotheses_met && d.detected &&
                  d.t_detect < 40.0 && tail < 0.1;
  verdict(5, ok, "thm2-decay nutrient stays below 1e-2 after a finite T < 40 with tail < 0.1",
          "T " + fmt("%.4g", d.t_detect) + ", tail " + fmt("%.4g", tail));
}

// ---- criterion 6 ----

void eventual_regularity(const std::map<std::string, PresetRun>& runs) {
  const FunctionalParams fp = pick_theta_delta(2.0);
  // Margins recomputed here from their definitions.
  const double q = 2.0;
  const double poly = q + 2.0 * q * (q - 1.0) + q * (q - 1.0) * (q - 1.0);
  const double num = 2.0 * q * fp.theta + 2.0 * q * (q - 1.0) * fp.delta;
  const double den = 4.0 * (fp.theta * (fp.theta + 1.0) - 2.0 * q * fp.theta * fp.delta);
  bool ok = 2.0 * (q - 1.0) - 4.0 * poly * fp.theta > 0.0 &&
            std::min({1.0, fp.theta, 1.0 / (4.0 * q)}) - fp.delta > 0.0 && den > 0.0 &&
            q * (q - 1.0) - num * num / den > 0.0;

  const RunResult& r = runs.at("thm2-decay").result;
  const RegularityReport& rep = r.report.regularity;
  ok = ok && rep.evaluated;
  std::string detail = "theta " + fmt("%.5g", fp.theta) + ", delta " + fmt("%.5g", fp.delta) + "; ";
  for (const char* name : {"weighted_functional", "u_sup", "v_sup", "w2p_u"}) {
    const auto it = std::find_if(rep.quantities.begin(), rep.quantities.end(),
                                 [&](const RegularityQuantity& x) { return x.name == name; });
    const bool found = it != rep.quantities.end() && it->samples >= 2;
    ok = ok && found && it->slope <= kRegularitySlopeTol;
    detail += std::string(name) + " slope " + (found ? fmt("%.3g", it->slope) : "n/a") + "; ";
  }
  verdict(6, ok, "theta/delta admissible and tail growth slopes <= 1e-3 after T+1", detail);
}

// ---- criterion 7 ----

void epsilon_robustness() {
  const EpsilonSweep s = sweep_epsilon(preset("thm1-core").config, {1e-1, 1e-2, 1e-3, 1e-4});
  const bool ok = strictly_decreasing(s.diff_u) && strictly_decreasing(s.diff_v) &&
                  strictly_decreasing(s.diff_w);
  std::string detail;
  for (std::size_t k = 0; k < s.diff_u.size(); ++k)
    detail += fmt("u %.3g ", s.diff_u[k]) + fmt("v %.3g ", s.diff_v[k]) + fmt("w %.3g; ", s.diff_w[k]);
  verdict(7, ok, "epsilon sweep differences strictly decreasing", detail);
}

// ---- criterion 8 ----

void weak_form(const std::map<std::string, PresetRun>& runs) {
  MmsOptions opt;
  opt.triple = "cosine";
  opt.levels = {32, 64};
  opt.weak_form = true;
  // The nutrient identity is the unregularized one.
  opt.params.epsilon = 0.0;
  const MmsStudy s = run_mms(opt);
  bool ok = true;
  std::string detail = "orders";
  for (double o : s.order_weak.front()) {
    ok = ok && o >= 1.0;
    detail += fmt(" %.3f", o);
  }
  detail += "; ";
  for (const auto& [name, pr] : runs) {
    const RunResult& r = pr.result;
    double worst = std::numeric_limits<double>::infinity();
    bool rows = false;
    for (const WeakResult& w : r.weak)
      if (w.identity == "defect_v") {
        rows = true;
        worst = std::min(worst, w.value + w.budget);
        ok = ok && w.pass;
      }
    ok = ok && rows && r.min_mass_slack >= -kMassSlackTolerance;
    detail += name + " defect margin " + fmt("%.3g", worst) + " slack " +
              fmt("%.3g", r.min_mass_slack) + "; ";
  }
  verdict(8, ok, "weak residuals first order on the MMS run; presets satisfy the inequalities", detail);
}

// ---- criterion 9 ----

void ode_comparison() {
  std::mt19937_64 rng(20240901);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  double worst = -std::numeric_limits<double>::infinity();
  for (int n = 0; n < 100; ++n) {
    const double a = 0.05 + 4.0 * U(rng), C = 5.0 * U(rng), y0 = 3.0 * U(rng);
    const int m = 1 + static_cast<int>(30 * U(rng));
    const int pattern = n % 3;
    const double bound = comparison_ode_bound(y0, a, C);
    double y = y0;
    // Piecewise-constant h on pieces of length 1/m whose unit-window mass is at most C.
    for (int k = 0; k < 40 * m; ++k) {
      double h = 0.0;
      if (pattern == 0) h = k % m == 0 ? C * m : 0.0;
      if (pattern == 1) h = C * U(rng);
      if (pattern == 2) h = C;
      const double tau = 1.0 / m, e = std::exp(-a * tau);
      y = y * e + h * (1.0 - e) / a;
      worst = std::max(worst, y - bound);
    }
  }
  double worst_mass = -std::numeric_limits<double>::infinity();
  for (int n = 0; n < 20; ++n) {
    const double alpha = 1.2 + 4.0 * U(rng), K = 0.1 + 2.0 * U(rng), L = 3.0 * U(rng);
    const double omega = 0.25 + 4.0 * U(rng), y0 = 6.0 * U(rng);
    const double star = mass_ode_star(alpha, K, L, omega, y0);
    const double c = K / std::pow(omega, alpha - 1.0);
    auto f = [&](double y) { return -c * std::pow(std::max(y, 0.0), alpha) + L * omega; };
    double y = y0;
    const double h = 5e-4;
    for (int k = 0; k < 60000; ++k) {
      const double k1 = f(y), k2 = f(y + 0.5 * h * k1), k3 = f(y + 0.5 * h * k2), k4 = f(y + h * k3);
      y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      worst_mass = std::max(worst_mass, y - star);
    }
  }
  const bool ok = worst <= 1e-8 && worst_mass <= 1e-8;
  verdict(9, ok, "scalar comparison bounds on 100 + 20 randomized instances",
          "max excess " + fmt("%.3g", worst) + " / " + fmt("%.3g", worst_mass));
}

// ---- criterion 10 ----

void gate_table() {
  auto spec = [](double a, double b) {
    return KineticSpec::with_defaults(PurePower{1.0, 1.0, a}, PurePower{1.0, 1.0, b});
  };
  ResupplySpec decaying;
  decaying.profile = ConstantProfile{0.2};
  decaying.decay_lambda = 1.0;
  struct Case {
    const char* label;
    bool got;
    bool want;
  };
  const Case cases[] = {
      {"gate1(4, 2)", check_theorem1(spec(4.0, 2.0)).pass, true},
      {"gate1(2.5, 2)", check_theorem1(spec(2.5, 2.0)).pass, false},
      {"gate1(3, 3)", check_theorem1(spec(3.0, 3.0)).pass, true},
      {"gate2(3, 3, mu 0.5)", check_theorem2(spec(3.0, 3.0), 0.5, decaying, 1.0, 1.0).pass, true},
      {"gate2(3, 2, mu 0.5)", check_theorem2(spec(3.0, 2.0), 0.5, decaying, 1.0, 1.0).pass, false},
      {"gate2(3, 3, mu 0)", check_theorem2(spec(3.0, 3.0), 0.0, decaying, 1.0, 1.0).pass, false},
  };
  bool ok = true;
  std::string detail;
  for (const Case& c : cases) {
    ok = ok && c.got == c.want;
    detail += std::string(c.label) + (c.got ? " pass" : " fail") + "; ";
  }
  verdict(10, ok, "parameter gate truth table", detail);
}

// ---- criterion 11 ----

void positivity_conservation(const std::map<std::string, PresetRun>& runs) {
  bool ok = true;
  std::string detail;
  for (const auto& [name, pr] : runs) {
    const RunResult& r = pr.result;
    const double limit = pr.preset.config.solve_tol * pr.preset.config.lx * pr.preset.config.ly;
    ok = ok && r.status == RunStatus::Completed && r.max_clamp <= kClampFloor &&
         r.max_mass_defect_u <= limit && r.max_mass_defect_v <= limit;
    detail += name + " clamp " + fmt("%.2g", r.max_clamp) + " defect " +
              fmt("%.2g", std::max(r.max_mass_defect_u, r.max_mass_defect_v)) + "; ";
  }
  verdict(11, ok, "no clamp above 1e-12 and per-step mass defect within solve tolerance", detail);
}

} // namespace

int main() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto runs = run_presets();
  mms_convergence();
  mass_bounds(runs);
  supersolution(runs);
  v_mass_identity();
  nutrient_decay(runs);
  eventual_regularity(runs);
  epsilon_robustness();
  weak_form(runs);
  ode_comparison();
  gate_table();
  positivity_conservation(runs);
  std::printf("%d of 11 criteria failed, %.1f s\n", failures, seconds_since(t0));
  return failures == 0 ? 0 : 1;
}
