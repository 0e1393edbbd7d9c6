#pragma once

#include <span>

#include "taxis/grid.hpp"

namespace taxis {

struct SolveOptions {
  double rel_tol = 1e-10;
  int max_iter = 2000;
};

struct SolveStats {
  int iterations = 0;
  /// ||b - A x||_2 / ||b||_2 of the returned iterate.
  double rel_residual = 0.0;
  /// vol * sum(b - A x): the mass the solve fails to conserve.
  double residual_mass = 0.0;
};

/// Applies A x = x - dt * Lap_h x + dt * diag .* x. An empty diag means zero.
void apply_shifted_laplacian(const Grid& g, double dt, std::span<const double> diag,
                             std::span<const double> x, std::span<double> out);

/// Jacobi-preconditioned conjugate gradients for A x = b, with A as in
/// apply_shifted_laplacian (symmetric positive definite for diag >= 0).
///
/// x carries the warm start on entry. Converged means both
/// ||r||_2 <= rel_tol ||b||_2 and |vol * sum r| <= rel_tol |Omega| / 2.
/// Throws SolverError after max_iter iterations.
SolveStats solve_shifted_laplacian(const Grid& g, double dt, std::span<const double> diag,
                                   const Field& rhs, Field& x, const SolveOptions& opts);

} // namespace taxis
