#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "taxis/config.hpp"
#include "taxis/monitors.hpp"
#include "taxis/presets.hpp"
#include "taxis/weakform.hpp"

namespace taxis {

struct RunOptions {
  /// Integrate even when the first gate fails; the manifest records
  /// "hypotheses unmet".
  bool force = false;
  /// false keeps everything in memory (no directory is touched).
  bool write_outputs = true;
  /// Overrides the config's output directory when set.
  std::filesystem::path out_dir;
  /// Stream every accepted step through the weak-form evaluator.
  bool weak_form = true;
  /// Called after every accepted step (and once for the initial state with dt = 0).
  std::function<void(const State&, const StepDiagnostics&, double dt)> observer;
};

enum class RunStatus { Completed, ValidationFailed, GateRejected, Aborted };

const char* status_name(RunStatus s);

struct RunResult {
  RunStatus status = RunStatus::Completed;
  std::string message;
  GateOutcome gates;
  bool hypotheses_met = true;
  State final_state;
  std::uint64_t steps = 0;
  double min_dt = 0.0;
  double max_dt = 0.0;
  SuiteReport report;
  /// Entries clamped to zero (all within the clamp floor).
  std::uint64_t clamp_events = 0;
  double max_clamp = 0.0;
  /// Largest per-step |mass defect| of u and v.
  double max_mass_defect_u = 0.0;
  double max_mass_defect_v = 0.0;
  std::vector<WeakResult> weak;
  double min_mass_slack = 0.0;
  std::filesystem::path out_dir;

  /// 0 completed with every pass/fail monitor passing, 1 validation or gate
  /// failure (or a failed monitor), 2 runtime abort.
  int exit_code() const;
};

/// Validates, checks the gates and integrates to t_end. Outputs: manifest.txt,
/// monitors.csv, timeseries.csv, summary.csv, weakform.csv and FLD1
/// snapshots; failure.txt on abort.
RunResult run(const Config& config, const RunOptions& options = {});

/// Manifest text: key = value header lines, then the config echo after the
/// marker line "# ---- config ----".
std::string manifest_text(const Config& c, const std::string& status, bool hypotheses_met);
/// Config echoed in a manifest.
Config config_from_manifest(const std::filesystem::path& manifest);

} // namespace taxis
