#include "taxis/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "taxis/errors.hpp"

namespace taxis {

Grid::Grid(std::size_t nx, std::size_t ny, double lx, double ly)
    : nx_(nx), ny_(ny), lx_(lx), ly_(ly), hx_(lx / static_cast<double>(nx)),
      hy_(ly / static_cast<double>(ny)) {
  if (nx < 4 || ny < 4)
    throw DomainError("grid needs at least 4 cells per direction, got " + std::to_string(nx) +
                      "x" + std::to_string(ny));
  if (!(lx > 0.0) || !(ly > 0.0) || !std::isfinite(lx) || !std::isfinite(ly))
    throw DomainError("grid side lengths must be positive and finite");
}

bool Grid::operator==(const Grid& other) const noexcept {
  return nx_ == other.nx_ && ny_ == other.ny_ && lx_ == other.lx_ && ly_ == other.ly_;
}

bool Field::all_finite() const noexcept {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

void require_conforming(const Field& phi, const Grid& g) {
  if (!phi.conforms(g))
    throw StructuralError("field of size " + std::to_string(phi.size()) +
                          " does not match grid with " + std::to_string(g.size()) + " cells");
}

Field laplacian(const Field& phi, const Grid& g) {
  require_conforming(phi, g);
  const std::size_t nx = g.nx(), ny = g.ny();
  const double cx = 1.0 / (g.hx() * g.hx());
  const double cy = 1.0 / (g.hy() * g.hy());
  Field out(g);
  for (std::size_t j = 0; j < ny; ++j) {
    for (std::size_t i = 0; i < nx; ++i) {
      const std::size_t k = g.index(i, j);
      const double c = phi[k];
      // Mirror ghosts: a missing neighbour contributes a zero difference.
      double acc = 0.0;
      if (i > 0) acc += cx * (phi[k - 1] - c);
      if (i + 1 < nx) acc += cx * (phi[k + 1] - c);
      if (j > 0) acc += cy * (phi[k - nx] - c);
      if (j + 1 < ny) acc += cy * (phi[k + nx] - c);
      out[k] = acc;
    }
  }
  return out;
}

namespace {

constexpr double kCarrierFloor = -1e-12;

inline double upwind(double carrier_lo, double carrier_hi, double dpot) {
  // dpot = potential(hi) - potential(lo); flux runs towards higher potential.
  return dpot >= 0.0 ? carrier_lo : carrier_hi;
}

} // namespace

Field taxis_divergence(const Field& carrier, const Field& potential, const Grid& g) {
  require_conforming(carrier, g);
  require_conforming(potential, g);
  for (std::size_t k = 0; k < carrier.size(); ++k)
    if (carrier[k] < kCarrierFloor)
      throw DomainError("taxis carrier is negative (" + std::to_string(carrier[k]) +
                        ") at cell " + std::to_string(k));

  const std::size_t nx = g.nx(), ny = g.ny();
  const double cx = 1.0 / (g.hx() * g.hx());
  const double cy = 1.0 / (g.hy() * g.hy());
  Field out(g);
  // Accumulate each face flux once into both adjacent cells.
  for (std::size_t j = 0; j < ny; ++j) {
    for (std::size_t i = 0; i + 1 < nx; ++i) {
      const std::size_t k = g.index(i, j);
      const double d = potential[k + 1] - potential[k];
      const double flux = cx * upwind(carrier[k], carrier[k + 1], d) * d;
      out[k] += flux;
      out[k + 1] -= flux;
    }
  }
  for (std::size_t j = 0; j + 1 < ny; ++j) {
    for (std::size_t i = 0; i < nx; ++i) {
      const std::size_t k = g.index(i, j);
      const double d = potential[k + nx] - potential[k];
      const double flux = cy * upwind(carrier[k], carrier[k + nx], d) * d;
      out[k] += flux;
      out[k + nx] -= flux;
    }
  }
  return out;
}

double integrate(std::span<const double> phi, const Grid& g) {
  if (phi.size() != g.size())
    throw StructuralError("field of size " + std::to_string(phi.size()) +
                          " does not match grid with " + std::to_string(g.size()) + " cells");
  double sum = 0.0;
  for (double v : phi) sum += v;
  return sum * g.cell_volume();
}

double integrate(const Field& phi, const Grid& g) { return integrate(phi.values(), g); }

double norm_lp(const Field& phi, const Grid& g, double p) {
  require_conforming(phi, g);
  if (!(p >= 1.0)) throw DomainError("norm_lp needs p >= 1");
  double sum = 0.0;
  for (double v : phi.values()) sum += std::pow(std::abs(v), p);
  return std::pow(sum * g.cell_volume(), 1.0 / p);
}

double norm_linf(const Field& phi) {
  double m = 0.0;
  for (double v : phi.values()) m = std::max(m, std::abs(v));
  return m;
}

double seminorm_w2p(const Field& phi, const Grid& g, double p) {
  require_conforming(phi, g);
  if (!(p >= 1.0)) throw DomainError("seminorm_w2p needs p >= 1");
  const std::size_t nx = g.nx(), ny = g.ny();
  const double hx = g.hx(), hy = g.hy();
  double sum = 0.0;
  for (std::size_t j = 0; j < ny; ++j) {
    const std::size_t jc = std::clamp<std::size_t>(j, 1, ny - 2);
    for (std::size_t i = 0; i < nx; ++i) {
      const std::size_t ic = std::clamp<std::size_t>(i, 1, nx - 2);
      auto at = [&](std::size_t a, std::size_t b) { return phi[g.index(a, b)]; };
      const double dxx = (at(ic + 1, j) - 2.0 * at(ic, j) + at(ic - 1, j)) / (hx * hx);
      const double dyy = (at(i, jc + 1) - 2.0 * at(i, jc) + at(i, jc - 1)) / (hy * hy);
      const double dxy = (at(ic + 1, jc + 1) - at(ic + 1, jc - 1) - at(ic - 1, jc + 1) +
                          at(ic - 1, jc - 1)) /
                         (4.0 * hx * hy);
      sum += std::pow(std::abs(dxx), p) + std::pow(std::abs(dyy), p) + std::pow(std::abs(dxy), p);
    }
  }
  return std::pow(sum * g.cell_volume(), 1.0 / p);
}

double max_face_gradient(const Field& phi, const Grid& g) {
  require_conforming(phi, g);
  const std::size_t nx = g.nx(), ny = g.ny();
  double m = 0.0;
  for (std::size_t j = 0; j < ny; ++j)
    for (std::size_t i = 0; i + 1 < nx; ++i) {
      const std::size_t k = g.index(i, j);
      m = std::max(m, std::abs(phi[k + 1] - phi[k]) / g.hx());
    }
  for (std::size_t j = 0; j + 1 < ny; ++j)
    for (std::size_t i = 0; i < nx; ++i) {
      const std::size_t k = g.index(i, j);
      m = std::max(m, std::abs(phi[k + nx] - phi[k]) / g.hy());
    }
  return m;
}

double log_gradient_energy(const Field& v, const Grid& g) {
  require_conforming(v, g);
  const std::size_t nx = g.nx(), ny = g.ny();
  double sum = 0.0;
  for (std::size_t j = 0; j < ny; ++j)
    for (std::size_t i = 0; i + 1 < nx; ++i) {
      const std::size_t k = g.index(i, j);
      const double d = (v[k + 1] - v[k]) / g.hx();
      const double s = 0.5 * (v[k] + v[k + 1]) + 1.0;
      sum += d * d / (s * s);
    }
  for (std::size_t j = 0; j + 1 < ny; ++j)
    for (std::size_t i = 0; i < nx; ++i) {
      const std::size_t k = g.index(i, j);
      const double d = (v[k + nx] - v[k]) / g.hy();
      const double s = 0.5 * (v[k] + v[k + nx]) + 1.0;
      sum += d * d / (s * s);
    }
  return sum * g.cell_volume();
}

double gradient_power_integral(const Field& phi, const Grid& g, double p) {
  require_conforming(phi, g);
  const std::size_t nx = g.nx(), ny = g.ny();
  double sum = 0.0;
  for (std::size_t j = 0; j < ny; ++j)
    for (std::size_t i = 0; i < nx; ++i) {
      const std::size_t k = g.index(i, j);
      const double left = i > 0 ? phi[k - 1] : phi[k];
      const double right = i + 1 < nx ? phi[k + 1] : phi[k];
      const double down = j > 0 ? phi[k - nx] : phi[k];
      const double up = j + 1 < ny ? phi[k + nx] : phi[k];
      const double gx = (right - left) / (2.0 * g.hx());
      const double gy = (up - down) / (2.0 * g.hy());
      sum += std::pow(gx * gx + gy * gy, 0.5 * p);
    }
  return sum * g.cell_volume();
}

} // namespace taxis
