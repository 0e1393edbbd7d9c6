#pragma once

#include <string>
#include <vector>

#include "taxis/config.hpp"

namespace taxis {

struct Preset {
  std::string name;
  std::string description;
  Config config;
  bool expect_gate1 = true;
  bool expect_gate2 = false;
  /// Decay and regularity monitors armed.
  bool decay_armed = false;
};

std::vector<std::string> preset_names();

/// Throws StructuralError for an unknown name.
Preset preset(const std::string& name);

struct GateOutcome {
  GateResult gate1;
  GateResult gate2;
};

GateOutcome evaluate_gates(const Config& c);

} // namespace taxis
