#pragma once

#include <cmath>
#include <cstddef>
#include <random>
#include <stdexcept>
#include <vector>

#include "taxis/grid.hpp"

namespace oracle {

using Matrix = std::vector<std::vector<double>>;

inline taxis::Field random_field(const taxis::Grid& g, std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> d(lo, hi);
  taxis::Field f(g);
  for (std::size_t k = 0; k < f.size(); ++k) f[k] = d(rng);
  return f;
}

/// Dense five-point Neumann Laplacian assembled from the face list.
inline Matrix dense_laplacian(const taxis::Grid& g) {
  const std::size_t n = g.size();
  Matrix a(n, std::vector<double>(n, 0.0));
  auto face = [&](std::size_t p, std::size_t q, double h) {
    const double c = 1.0 / (h * h);
    a[p][q] += c;
    a[q][p] += c;
    a[p][p] -= c;
    a[q][q] -= c;
  };
  for (std::size_t j = 0; j < g.ny(); ++j)
    for (std::size_t i = 0; i < g.nx(); ++i) {
      if (i + 1 < g.nx()) face(g.index(i, j), g.index(i + 1, j), g.hx());
      if (j + 1 < g.ny()) face(g.index(i, j), g.index(i, j + 1), g.hy());
    }
  return a;
}

/// Upwinded taxis divergence evaluated face by face.
inline taxis::Field taxis(const taxis::Field& c, const taxis::Field& p, const taxis::Grid& g) {
  taxis::Field out(g);
  auto face = [&](std::size_t a, std::size_t b, double h) {
    const double carrier = p[b] >= p[a] ? c[a] : c[b];
    const double flux = carrier * (p[b] - p[a]) / h;
    out[a] += flux / h;
    out[b] -= flux / h;
  };
  for (std::size_t j = 0; j < g.ny(); ++j)
    for (std::size_t i = 0; i < g.nx(); ++i) {
      if (i + 1 < g.nx()) face(g.index(i, j), g.index(i + 1, j), g.hx());
      if (j + 1 < g.ny()) face(g.index(i, j), g.index(i, j + 1), g.hy());
    }
  return out;
}

/// Gaussian elimination with partial pivoting.
inline std::vector<double> solve(Matrix a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    if (a[piv][col] == 0.0) throw std::runtime_error("singular matrix");
    std::swap(a[piv], a[col]);
    std::swap(b[piv], b[col]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double m = a[r][col] / a[col][col];
      if (m == 0.0) continue;
      for (std::size_t c = col; c < n; ++c) a[r][c] -= m * a[col][c];
      b[r] -= m * b[col];
    }
  }
  std::vector<double> x(n);
  for (std::size_t r = n; r-- > 0;) {
    double s = b[r];
    for (std::size_t c = r + 1; c < n; ++c) s -= a[r][c] * x[c];
    x[r] = s / a[r][r];
  }
  return x;
}

/// I - dt Lap + dt diag(d).
inline Matrix shifted(const taxis::Grid& g, double dt, const std::vector<double>& d) {
  Matrix a = dense_laplacian(g);
  for (std::size_t r = 0; r < a.size(); ++r) {
    for (double& v : a[r]) v *= -dt;
    a[r][r] += 1.0 + (d.empty() ? 0.0 : dt * d[r]);
  }
  return a;
}

} // namespace oracle
