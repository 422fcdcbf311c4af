// Copyright 2026 hyntp-lab contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>

#include "hyntp/certify.hpp"
#include "hyntp/cli/scenario.hpp"
#include "hyntp/hybrid.hpp"

namespace hyntp::cli {

enum class Command { simulate, certify, compare_reduction, sweep_noise };

std::optional<Command> parse_command(const std::string& name);
std::string command_name(Command c);

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int usage = 1;
inline constexpr int certification_failed = 2;
inline constexpr int invariant_violated = 3;
}  // namespace exit_code

struct RunOptions {
  std::filesystem::path out_dir = ".";
  std::optional<std::uint64_t> seed;  // replaces the timer and noise seeds
  std::optional<double> step;         // replaces the integration step
  certify::Exec exec = certify::Exec::parallel;
};

/// Returns a copy of `s` with the overrides of `options` applied.
Scenario apply_overrides(const Scenario& s, const RunOptions& options);

/// Closed-loop simulation of a scenario.
hybrid::HybridSolution simulate_scenario(const Scenario& s);

/// Largest deviations between matched-schedule trajectories of the reductions.
struct ReductionReport {
  double full_vs_reduced = 0.0;         // sup |x - lift(xi)| from the first jump on
  double reduced_vs_transformed = 0.0;  // sup |xi - Gamma chi| from the start
  std::size_t samples_full = 0;
  std::size_t samples_transformed = 0;
  double first_jump_time = 0.0;
};

/// Runs the closed loop, the error-coordinate system and the transformed system
/// over `horizon` with a shared reset schedule and compares them sample by sample.
ReductionReport compare_reduction(const Scenario& s, hybrid::Horizon horizon);

/// Executes one command for one scenario. Artifacts go to options.out_dir and are
/// named after the scenario; diagnostics go to `log`. Returns a process exit code.
int run(const Scenario& s, Command command, const RunOptions& options, std::ostream& log);

}  // namespace hyntp::cli
