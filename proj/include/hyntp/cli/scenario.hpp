// Copyright 2026 hyntp-lab contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "hyntp/certify.hpp"
#include "hyntp/hybrid.hpp"
#include "hyntp/model.hpp"
#include "hyntp/robustness.hpp"

namespace hyntp::cli {

/// Noise sweep settings: the base noise is scaled by each entry of `levels`.
struct NoiseSweep {
  robustness::NoiseConfig noise;
  std::vector<double> levels{0.0, 1.0, 2.0, 4.0};
  int trials = 4;
  double horizon = 0.0;  // seconds; 0 means the scenario horizon
  bool from_initial = false;  // start trials from the scenario state instead of the goal set
};

struct Outputs {
  bool csv = true;
  bool svg = true;
};

/// One experiment setup as read from a schema-1 JSON file.
struct Scenario {
  std::string name;
  model::NetworkParams params;
  std::optional<certify::Certificate> certificate;
  bool certificate_symmetrized = false;
  model::ClosedLoopState initial;
  model::ReferenceClock reference;
  hybrid::Horizon horizon;
  double step = 1e-3;
  std::optional<NoiseSweep> noise;
  Outputs outputs;
};

/// Parses and validates scenario text; `origin` names the source in messages.
Scenario parse_scenario(const std::string& text, const std::string& origin);

/// Reads and parses a scenario file. Throws ConfigError on any problem.
Scenario load_scenario(const std::filesystem::path& path);

}  // namespace hyntp::cli
