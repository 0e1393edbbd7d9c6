#pragma once

#include <array>
#include <string>
#include <vector>

#include "taxis/config.hpp"
#include "taxis/manufactured.hpp"
#include "taxis/solver.hpp"

namespace taxis {

// ---- manufactured-solution convergence ----

struct MmsOptions {
  std::string triple = "cosine";
  std::vector<std::size_t> levels{32, 64, 128};
  double t_end = 0.1;
  /// dt = dt_factor * h^2, shrunk so that t_end is hit exactly.
  double dt_factor = 1.0;
  ModelParams params = mms_params();
  /// Stream every step through the weak-form basis.
  bool weak_form = false;
};

struct MmsLevel {
  std::size_t nx = 0;
  double h = 0.0;
  double dt = 0.0;
  std::size_t steps = 0;
  std::array<double, 3> err_l2{};
  std::array<double, 3> err_linf{};
  /// Largest |value| over the basis of each weak-form residual (u, w, v).
  std::array<double, 3> weak_max{};
  double seconds = 0.0;
};

struct MmsStudy {
  std::string triple;
  std::vector<MmsLevel> levels;
  /// orders[k] compares levels k and k + 1.
  std::vector<std::array<double, 3>> order_l2;
  std::vector<std::array<double, 3>> order_linf;
  std::vector<std::array<double, 3>> order_weak;
  /// Every error below 1e-12: orders are meaningless and reported as exact.
  bool exact = false;
  double seconds = 0.0;
};

/// Throws StructuralError for levels that are not strictly ascending.
MmsStudy run_mms(const MmsOptions& options);

double observed_order(double err_coarse, double err_fine, double h_coarse, double h_fine);

// ---- epsilon sweep ----

struct EpsilonSweep {
  std::vector<double> eps;
  /// Consecutive differences over the space-time cylinder:
  /// L2 for u and w, L1 for v. Entry k compares eps[k] and eps[k + 1].
  std::vector<double> diff_u;
  std::vector<double> diff_v;
  std::vector<double> diff_w;
  double t_end = 0.0;
  std::size_t steps = 0;
  double w_star = 0.0;
};

/// Runs identical configs per epsilon in lockstep with a common step (the
/// smallest suggested step among members). Requires a descending list.
EpsilonSweep sweep_epsilon(const Config& base, const std::vector<double>& eps);

bool strictly_decreasing(const std::vector<double>& x);

} // namespace taxis
