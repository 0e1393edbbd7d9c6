#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "taxis/grid.hpp"
#include "taxis/kinetics.hpp"
#include "taxis/monitors.hpp"
#include "taxis/solver.hpp"

namespace taxis {

/// One growth law with optional envelope overrides.
struct LawConfig {
  /// power | allee | logistic
  std::string law = "power";
  double K = 1.0;
  double L = 1.0;
  double a = 1.0;
  double b = 1.0;
  double exponent = 3.0;
  std::optional<double> env_K, env_L, env_k, env_l;

  bool operator==(const LawConfig&) const = default;
};

/// constant: value. gaussian: floor + amplitude exp(-|X - c|^2 / width^2).
/// random: mean + amplitude * U(-1, 1), cut at zero, from a 64-bit seed.
struct InitialRecipe {
  std::string kind = "constant";
  double value = 1.0;
  double cx = 0.5;
  double cy = 0.5;
  double width = 0.2;
  double amplitude = 1.0;
  double floor = 0.0;
  double mean = 1.0;
  std::uint64_t seed = 0;

  bool operator==(const InitialRecipe&) const = default;
};

struct Config {
  // [grid]
  std::size_t nx = 32, ny = 32;
  double lx = 1.0, ly = 1.0;
  // [time]
  double t_end = 1.0;
  double dt_max = 1e-3;
  double safety = 0.2;
  bool adaptive = true;
  double solve_tol = 1e-10;
  int max_iter = 2000;
  // [model]
  double mu = 0.0;
  double epsilon = 0.0;
  // [kinetics]
  LawConfig f, g;
  // [resupply]
  std::string profile = "constant";
  double r_amplitude = 0.0;
  double r_cx = 0.5, r_cy = 0.5, r_width = 0.2;
  double r_decay = 0.0;
  // [initial]
  InitialRecipe u0, v0, w0;
  // [monitors]
  std::size_t cadence = 1;
  double delta = 1e-2;
  double q = 2.0;
  // [output]
  std::string out_dir = "out";
  std::size_t snapshot_every = 100;

  bool operator==(const Config&) const = default;
};

/// INI text: `[section]`, `key = value`, `#` or `;` comments. Unknown
/// sections or keys and malformed values raise ConfigError with the line.
Config parse_config(std::string_view text);
Config load_config(const std::filesystem::path& path);
/// Canonical INI text; parse_config(to_ini(c)) == c.
std::string to_ini(const Config& c);

Grid make_grid(const Config& c);
GrowthLaw make_law(const LawConfig& lc);
KineticSpec make_kinetics(const Config& c);
ResupplySpec make_resupply(const Config& c);
ModelParams make_params(const Config& c);
Field make_initial_field(const InitialRecipe& r, const Grid& g);
InitialData make_initial(const Config& c, const Grid& g);
StepControl make_control(const Config& c);
MonitorSettings make_monitor_settings(const Config& c, bool decay_armed);

/// Every module check before any compute: grid, parameters, step control,
/// kinetics (structure and envelope), resupply, initial data, output
/// settings. Throws ConfigError listing the first violation.
void validate_config(const Config& c);

/// git-style blob SHA-1 of the text ("blob <len>\0" + text), lowercase hex.
std::string content_hash(std::string_view text);

} // namespace taxis
