#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <sstream>

#include "taxis/errors.hpp"
#include "taxis/weakform.hpp"

using namespace taxis;
namespace fs = std::filesystem;

namespace {

ModelParams cubic_params(double mu, double eps, double r) {
  ModelParams p;
  p.mu = mu;
  p.epsilon = eps;
  p.resupply.profile = ConstantProfile{r};
  p.kinetics = KineticSpec::with_defaults(PurePower{1.0, 1.0, 3.0}, PurePower{1.0, 1.0, 3.0});
  return p;
}

InitialData bumps(const Grid& g) {
  auto gauss = [&](double cx, double cy, double w, double a, double f) {
    return sample(g, [=](double x, double y) {
      return f + a * std::exp(-((x - cx) * (x - cx) + (y - cy) * (y - cy)) / (w * w));
    });
  };
  return {gauss(0.35, 0.4, 0.2, 1.5, 0.2), gauss(0.65, 0.6, 0.25, 1.0, 0.3),
          gauss(0.5, 0.5, 0.3, 1.0, 0.2)};
}

// Integrates with fixed dt and feeds every state to the evaluator; optionally
// writes FLD1 snapshots every `every` steps.
void simulate(const Grid& g, const ModelParams& p, double dt, int steps, WeakFormEvaluator* eval,
              const fs::path& dir = {}, int every = 1) {
  State s = initial_state(bumps(g));
  const StepControl ctl{dt, 0.2, 1e-12, 4000};
  auto emit = [&](const State& st) {
    if (eval) eval->add(st.t, st.u, st.v, st.w);
    if (!dir.empty() && st.step_index % static_cast<std::uint64_t>(every) == 0) {
      char name[32];
      for (const char* c : {"u", "v", "w"}) {
        std::snprintf(name, sizeof name, "%s_%08llu.fld", c,
                      static_cast<unsigned long long>(st.step_index));
        const Field& f = *c == 'u' ? st.u : *c == 'v' ? st.v : st.w;
        write_fld(dir / name, g, st.t, f);
      }
    }
  };
  emit(s);
  for (int n = 0; n < steps; ++n) {
    s = step(s, p, dt, g, ctl);
    emit(s);
  }
}

fs::path fresh_dir(const char* name) {
  const fs::path d = fs::temp_directory_path() / name;
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

} // namespace

TEST_CASE("temporal factors") {
  const TemporalFactor b = TemporalFactor::bump(0.2, 0.8);
  CHECK(b.value(0.5) == doctest::Approx(1.0));
  CHECK(b.value(0.2) == 0.0);
  CHECK(b.value(0.9) == 0.0);
  const TemporalFactor s = TemporalFactor::start(0.2, 0.5);
  CHECK(s.value(0.0) == 1.0);
  CHECK(s.value(0.35) == doctest::Approx(0.5));
  CHECK(s.value(0.6) == 0.0);
  CHECK(s.support_begin() == 0.0);
  for (const TemporalFactor& f : {b, s})
    for (double t : {0.25, 0.3, 0.41, 0.47, 0.7}) {
      const double h = 1e-6;
      const double fd = (f.value(t + h) - f.value(t - h)) / (2.0 * h);
      CHECK(f.derivative(t) == doctest::Approx(fd).epsilon(1e-6).scale(1.0));
    }
}

TEST_CASE("spatial factors") {
  const SpatialFactor s = SpatialFactor::bump(0.4, 0.5, 0.3);
  CHECK(s.value(0.4, 0.5) == doctest::Approx(1.0));
  CHECK(s.value(0.75, 0.5) == 0.0);
  for (auto [x, y] : {std::pair{0.5, 0.55}, std::pair{0.3, 0.6}, std::pair{0.6, 0.4}}) {
    const double h = 1e-6;
    const auto gr = s.gradient(x, y);
    CHECK(gr[0] == doctest::Approx((s.value(x + h, y) - s.value(x - h, y)) / (2 * h)).epsilon(1e-6));
    CHECK(gr[1] == doctest::Approx((s.value(x, y + h) - s.value(x, y - h)) / (2 * h)).epsilon(1e-6));
  }
  CHECK(SpatialFactor::one().value(3.0, -1.0) == 1.0);
}

TEST_CASE("standard basis") {
  const auto basis = standard_basis(2.0, 1.0, 1.5);
  CHECK(basis.size() == 5);
  for (const TestFunction& phi : basis) {
    CHECK(phi.nonnegative());
    CHECK(phi.support_begin() >= 0.0);
    CHECK(phi.support_end() <= 2.0);
    for (const TestTerm& m : phi.terms)
      if (!m.space.constant) {
        CHECK(m.space.cx - m.space.radius >= 0.0);
        CHECK(m.space.cx + m.space.radius <= 1.0);
        CHECK(m.space.cy - m.space.radius >= 0.0);
        CHECK(m.space.cy + m.space.radius <= 1.5);
      }
  }
}

TEST_CASE("disjoint support and zero test functions are vacuous") {
  Grid g(8, 8);
  const ModelParams p = cubic_params(0.0, 0.0, 0.0);
  WeakFormEvaluator eval(g, p,
                         {TestFunction::separable("late", SpatialFactor::one(), TemporalFactor::bump(5.0, 6.0)),
                          TestFunction{"zero", {}},
                          TestFunction::separable("null", SpatialFactor::one(), TemporalFactor::bump(0.1, 0.2), 0.0)});
  simulate(g, p, 1e-2, 30, &eval);
  CHECK(eval.value(0, Identity::ForagerU) == 0.0);
  CHECK(eval.value(1, Identity::NutrientW) == 0.0);
  CHECK(eval.value(2, Identity::LogExploiterV) == 0.0);
  const auto rows = eval.results();
  CHECK(rows[0].vacuous);
  CHECK(rows[0].pass);
}

TEST_CASE("steady forager satisfies its identity") {
  Grid g(8, 8);
  const ModelParams p = cubic_params(0.0, 0.0, 0.0);
  WeakFormEvaluator eval(g, p, {TestFunction::separable("c", SpatialFactor::one(), TemporalFactor::bump(0.2, 0.8))});
  for (int k = 0; k <= 1000; ++k) eval.add(1e-3 * k, Field(g, 1.0), Field(g, 1.0), Field(g));
  CHECK(std::abs(eval.value(0, Identity::ForagerU)) < 1e-6);
}

TEST_CASE("exponential nutrient decay satisfies its identity") {
  Grid g(8, 8);
  const double mu = 0.7;
  const ModelParams p = cubic_params(mu, 0.0, 0.0);
  const TestFunction phi =
      TestFunction::separable("b", SpatialFactor::bump(0.5, 0.5, 0.3), TemporalFactor::bump(0.2, 0.8));
  WeakFormEvaluator eval(g, p, {phi});
  const Field w0 = sample(g, [](double x, double y) { return 1.0 + 0.5 * std::cos(std::numbers::pi * x) * std::cos(std::numbers::pi * y); });
  for (int k = 0; k <= 1000; ++k) {
    const double t = 1e-3 * k;
    Field w = w0;
    for (double& x : w.data()) x *= std::exp(-mu * t);
    eval.add(t, Field(g), Field(g), w);
  }
  CHECK(std::abs(eval.value(0, Identity::NutrientW)) < 1e-8);
}

TEST_CASE("residuals are linear in the test function") {
  Grid g(12, 12);
  const ModelParams p = cubic_params(0.3, 0.0, 0.1);
  const auto basis = standard_basis(0.3, 1.0, 1.0);
  const TestFunction mix = combine(2.0, basis[1], -0.5, basis[3]);
  CHECK_FALSE(mix.nonnegative());
  WeakFormEvaluator eval(g, p, {basis[1], basis[3], mix});
  simulate(g, p, 1e-3, 300, &eval);
  for (Identity id : {Identity::ForagerU, Identity::NutrientW, Identity::LogExploiterV}) {
    const double want = 2.0 * eval.value(0, id) - 0.5 * eval.value(1, id);
    CHECK(eval.value(2, id) == doctest::Approx(want).epsilon(1e-10).scale(1.0));
  }
  // Signed functions get no inequality row.
  std::size_t rows_for_mix = 0;
  for (const WeakResult& r : eval.results())
    if (r.test_fn == mix.name) ++rows_for_mix;
  CHECK(rows_for_mix == 2);
}

TEST_CASE("discrete trajectories satisfy every identity within budget") {
  Grid g(24, 24);
  const ModelParams p = cubic_params(0.3, 0.0, 0.1);
  WeakFormEvaluator eval(g, p, standard_basis(0.5, 1.0, 1.0));
  simulate(g, p, 1e-3, 500, &eval);
  for (const WeakResult& r : eval.results()) {
    INFO(r.test_fn << " " << r.identity << " value " << r.value << " budget " << r.budget);
    CHECK(r.pass);
    CHECK_FALSE(r.vacuous);
  }
  CHECK(eval.mass_slack().front().slack == 0.0);
  CHECK(eval.min_mass_slack() >= -kMassSlackTolerance);
}

TEST_CASE("mass slack shrinks with the step") {
  Grid g(16, 16);
  const ModelParams p = cubic_params(0.0, 0.0, 0.0);
  double prev = 0.0;
  for (int level = 0; level < 2; ++level) {
    const double dt = 2e-3 / (1 << level);
    WeakFormEvaluator eval(g, p, {});
    simulate(g, p, dt, 100 << level, &eval);
    const double worst = std::abs(eval.min_mass_slack());
    if (level == 1) CHECK(prev / worst == doctest::Approx(2.0).epsilon(0.15));
    prev = worst;
  }
}

TEST_CASE("evaluator errors") {
  Grid g(8, 8);
  const ModelParams p = cubic_params(0.0, 0.0, 0.0);
  WeakFormEvaluator eval(g, p, {TestFunction::separable("b", SpatialFactor::one(), TemporalFactor::bump(0.5, 2.0))});
  eval.add(0.0, Field(g, 1.0), Field(g, 1.0), Field(g));
  eval.add(1.0, Field(g, 1.0), Field(g, 1.0), Field(g));
  CHECK_THROWS_AS(eval.add(1.0, Field(g, 1.0), Field(g, 1.0), Field(g)), StructuralError);
  CHECK_THROWS_AS(eval.value(0, Identity::ForagerU), StructuralError);
  CHECK_THROWS_AS(eval.value(3, Identity::ForagerU), StructuralError);
  CHECK_THROWS_AS(eval.add(2.0, Field(Grid(8, 9)), Field(g), Field(g)), StructuralError);
}

TEST_CASE("recorded trajectories") {
  const fs::path dir = fresh_dir("taxis_test_weak_traj");
  Grid g(12, 12);
  const ModelParams p = cubic_params(0.3, 0.0, 0.1);
  const auto basis = standard_basis(0.2, 1.0, 1.0);
  WeakFormEvaluator live(g, p, basis);
  simulate(g, p, 1e-3, 200, &live, dir, 10);
  const TrajectoryHandle traj = TrajectoryHandle::open(dir);
  CHECK(traj.entries().size() == 21);
  CHECK(traj.entries().back().t == doctest::Approx(0.2));
  CHECK(traj.load(3).u.size() == g.size());

  const double ru = residual_u(traj, basis[0], p);
  const double rw = residual_w(traj, basis[0], p);
  const double dv = defect_v(traj, basis[0], p);
  CHECK(std::isfinite(ru));
  CHECK(std::isfinite(rw));
  CHECK(std::isfinite(dv));
  CHECK_THROWS_AS(defect_v(traj, combine(1.0, basis[0], -1.0, basis[1]), p), DomainError);
  const auto slack = check_mass_inequality(traj, p);
  CHECK(slack.size() == 21);
  CHECK(slack.front().slack == 0.0);

  std::ostringstream os;
  WeakFormEvaluator eval(traj.grid(), p, basis);
  traj.stream(eval);
  write_weakform_csv(os, eval.results(), eval.min_mass_slack());
  const std::string csv = os.str();
  CHECK(csv.rfind("test_fn,identity,value,budget,pass\n", 0) == 0);
  CHECK(csv.find("-,mass_inequality,") != std::string::npos);

  fs::remove(dir / "v_00000010.fld");
  CHECK_THROWS_AS(TrajectoryHandle::open(dir), StructuralError);
  fs::remove_all(dir);
  CHECK_THROWS_AS(TrajectoryHandle::open(dir), StructuralError);
}
