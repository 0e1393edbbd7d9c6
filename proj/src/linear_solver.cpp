#include "taxis/linear_solver.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "taxis/errors.hpp"

namespace taxis {

void apply_shifted_laplacian(const Grid& g, double dt, std::span<const double> diag,
                             std::span<const double> x, std::span<double> out) {
  const std::size_t nx = g.nx(), ny = g.ny();
  const double cx = dt / (g.hx() * g.hx());
  const double cy = dt / (g.hy() * g.hy());
  const bool has_diag = !diag.empty();
  for (std::size_t j = 0; j < ny; ++j) {
    for (std::size_t i = 0; i < nx; ++i) {
      const std::size_t k = g.index(i, j);
      const double c = x[k];
      double lap = 0.0;
      if (i > 0) lap += cx * (c - x[k - 1]);
      if (i + 1 < nx) lap += cx * (c - x[k + 1]);
      if (j > 0) lap += cy * (c - x[k - nx]);
      if (j + 1 < ny) lap += cy * (c - x[k + nx]);
      double v = c + lap;
      if (has_diag) v += dt * diag[k] * c;
      out[k] = v;
    }
  }
}

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

double sum(std::span<const double> a) {
  double s = 0.0;
  for (double v : a) s += v;
  return s;
}

} // namespace

SolveStats solve_shifted_laplacian(const Grid& g, double dt, std::span<const double> diag,
                                   const Field& rhs, Field& x, const SolveOptions& opts) {
  require_conforming(rhs, g);
  require_conforming(x, g);
  if (!diag.empty() && diag.size() != g.size())
    throw StructuralError("diagonal of size " + std::to_string(diag.size()) +
                          " does not match grid");

  const std::size_t n = g.size();
  const std::size_t nx = g.nx(), ny = g.ny();
  const double cx = dt / (g.hx() * g.hx());
  const double cy = dt / (g.hy() * g.hy());
  const double vol = g.cell_volume();

  std::vector<double> inv_diag(n);
  for (std::size_t j = 0; j < ny; ++j)
    for (std::size_t i = 0; i < nx; ++i) {
      const std::size_t k = g.index(i, j);
      double d = 1.0;
      d += cx * (static_cast<double>(i > 0) + static_cast<double>(i + 1 < nx));
      d += cy * (static_cast<double>(j > 0) + static_cast<double>(j + 1 < ny));
      if (!diag.empty()) d += dt * diag[k];
      inv_diag[k] = 1.0 / d;
    }

  const double b_norm = std::sqrt(dot(rhs.values(), rhs.values()));
  SolveStats stats;
  if (b_norm == 0.0) {
    std::fill(x.data().begin(), x.data().end(), 0.0);
    return stats;
  }
  const double mass_tol = 0.5 * opts.rel_tol * g.area();

  std::vector<double> r(n), z(n), p(n), q(n);
  auto true_residual = [&] {
    apply_shifted_laplacian(g, dt, diag, x.values(), q);
    for (std::size_t k = 0; k < n; ++k) r[k] = rhs[k] - q[k];
  };
  auto converged = [&](double r_norm) {
    return r_norm <= opts.rel_tol * b_norm && std::abs(vol * sum(r)) <= mass_tol;
  };

  true_residual();
  int it = 0;
  while (true) {
    double r_norm = std::sqrt(dot(r, r));
    if (converged(r_norm)) break;
    for (std::size_t k = 0; k < n; ++k) z[k] = inv_diag[k] * r[k];
    p = z;
    double rz = dot(r, z);
    bool restart = false;
    while (!restart) {
      if (it >= opts.max_iter)
        throw SolverError("conjugate gradients did not converge in " +
                          std::to_string(opts.max_iter) + " iterations (relative residual " +
                          std::to_string(r_norm / b_norm) + ")");
      ++it;
      apply_shifted_laplacian(g, dt, diag, p, q);
      const double alpha = rz / dot(p, q);
      for (std::size_t k = 0; k < n; ++k) {
        x[k] += alpha * p[k];
        r[k] -= alpha * q[k];
      }
      r_norm = std::sqrt(dot(r, r));
      if (converged(r_norm)) {
        // Confirm against the true residual; recurrence drift triggers a restart.
        true_residual();
        restart = true;
        break;
      }
      for (std::size_t k = 0; k < n; ++k) z[k] = inv_diag[k] * r[k];
      const double rz_new = dot(r, z);
      const double beta = rz_new / rz;
      rz = rz_new;
      for (std::size_t k = 0; k < n; ++k) p[k] = z[k] + beta * p[k];
    }
  }
  stats.iterations = it;
  stats.rel_residual = std::sqrt(dot(r, r)) / b_norm;
  stats.residual_mass = vol * sum(r);
  return stats;
}

} // namespace taxis
