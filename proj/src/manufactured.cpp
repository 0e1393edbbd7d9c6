#include "taxis/manufactured.hpp"

#include <cmath>
#include <numbers>

#include "taxis/errors.hpp"

namespace taxis {

ManufacturedTriple constant_triple() {
  return {"constant", {CosineMode{1.0, 0.0, 0, 0, 0.0}, CosineMode{1.0, 0.0, 0, 0, 0.0},
                       CosineMode{0.0, 0.0, 0, 0, 0.0}}};
}

ManufacturedTriple forager_only_triple() {
  return {"forager", {CosineMode{2.0, 1.0, 1, 1, 1.0}, CosineMode{1.0, 0.0, 0, 0, 0.0},
                      CosineMode{0.0, 0.0, 0, 0, 0.0}}};
}

ManufacturedTriple separated_cosine_triple() {
  return {"cosine", {CosineMode{2.0, 0.5, 1, 0, 1.0}, CosineMode{1.5, 0.5, 0, 1, 1.0},
                     CosineMode{1.0, 0.5, 0, 1, 1.0}}};
}

ManufacturedTriple coupled_cosine_triple() {
  return {"coupled", {CosineMode{2.0, 0.5, 1, 1, 1.0}, CosineMode{1.5, 0.5, 1, 1, 1.0},
                      CosineMode{1.0, 0.5, 1, 1, 1.0}}};
}

ManufacturedTriple manufactured_triple(const std::string& name) {
  if (name == "constant") return constant_triple();
  if (name == "forager") return forager_only_triple();
  if (name == "cosine") return separated_cosine_triple();
  if (name == "coupled") return coupled_cosine_triple();
  throw StructuralError("unknown manufactured triple '" + name + "'");
}

ModeValue eval_mode(const CosineMode& m, double x, double y, double t, double lx, double ly) {
  const double ax = m.kx * std::numbers::pi / lx;
  const double ay = m.ky * std::numbers::pi / ly;
  const double cx = std::cos(ax * x), sx = std::sin(ax * x);
  const double cy = std::cos(ay * y), sy = std::sin(ay * y);
  const double amp = m.amplitude * std::exp(-m.decay * t);
  ModeValue out;
  out.value = m.base + amp * cx * cy;
  out.dt = -m.decay * amp * cx * cy;
  out.dx = -amp * ax * sx * cy;
  out.dy = -amp * ay * cx * sy;
  out.lap = -amp * (ax * ax + ay * ay) * cx * cy;
  return out;
}

namespace {

void check_supported(const ManufacturedTriple& tri) {
  for (const CosineMode& m : tri.modes) {
    if (m.kx < 0 || m.ky < 0)
      throw StructuralError("manufactured triple '" + tri.name + "' has a negative wave number");
    if (m.base - std::abs(m.amplitude) < 0.0)
      throw StructuralError("manufactured triple '" + tri.name + "' is not nonnegative");
  }
}

} // namespace

std::array<Field, 3> manufactured_fields(const ManufacturedTriple& tri, const Grid& g, double t) {
  std::array<Field, 3> out;
  for (int c = 0; c < 3; ++c)
    out[c] = sample(g, [&](double x, double y) {
      return eval_mode(tri.modes[c], x, y, t, g.lx(), g.ly()).value;
    });
  return out;
}

std::array<double, 3> mms_source_at(const ManufacturedTriple& tri, const ModelParams& params,
                                    double x, double y, double t, double lx, double ly) {
  const ModeValue u = eval_mode(tri.modes[0], x, y, t, lx, ly);
  const ModeValue v = eval_mode(tri.modes[1], x, y, t, lx, ly);
  const ModeValue w = eval_mode(tri.modes[2], x, y, t, lx, ly);
  // div(a grad b) = grad a . grad b + a lap b
  const double taxis_u = u.dx * w.dx + u.dy * w.dy + u.value * w.lap;
  const double taxis_v = v.dx * u.dx + v.dy * u.dy + v.value * u.lap;
  const double su = u.dt - u.lap + taxis_u - eval_law(params.kinetics.law_f, u.value);
  const double sv = v.dt - v.lap + taxis_v - eval_law(params.kinetics.law_g, v.value);
  const double cons = consumption_rate(u.value, v.value, w.value, params.epsilon) * w.value;
  const double sw = w.dt - w.lap + cons + params.mu * w.value -
                    params.resupply.profile_at(x, y) * params.resupply.factor(t);
  return {su, sv, sw};
}

std::array<Field, 3> mms_source(const ManufacturedTriple& tri, const ModelParams& params,
                                const Grid& g, double t) {
  check_supported(tri);
  std::array<Field, 3> out{Field(g), Field(g), Field(g)};
  for (std::size_t j = 0; j < g.ny(); ++j)
    for (std::size_t i = 0; i < g.nx(); ++i) {
      const auto s = mms_source_at(tri, params, g.x(i), g.y(j), t, g.lx(), g.ly());
      const std::size_t k = g.index(i, j);
      out[0][k] = s[0];
      out[1][k] = s[1];
      out[2][k] = s[2];
    }
  return out;
}

Forcing mms_forcing(const ManufacturedTriple& tri, const ModelParams& params, const Grid& g) {
  check_supported(tri);
  return [tri, params, g](double t, Field& su, Field& sv, Field& sw) {
    for (std::size_t j = 0; j < g.ny(); ++j)
      for (std::size_t i = 0; i < g.nx(); ++i) {
        const auto s = mms_source_at(tri, params, g.x(i), g.y(j), t, g.lx(), g.ly());
        const std::size_t k = g.index(i, j);
        su[k] = s[0];
        sv[k] = s[1];
        sw[k] = s[2];
      }
  };
}

ModelParams mms_params() {
  ModelParams p;
  p.mu = 0.5;
  p.epsilon = 1e-3;
  p.resupply.profile = ConstantProfile{0.1};
  p.kinetics = KineticSpec::with_defaults(PurePower{1.0, 1.0, 3.0}, PurePower{1.0, 1.0, 3.0});
  return p;
}

} // namespace taxis
