// Copyright 2026 hyntp-lab contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "hyntp/matrix.hpp"

namespace hyntp::hybrid {

struct SeededSchedule {
  std::uint64_t seed = 0;
};

struct ExplicitSchedule {
  std::vector<double> resets;
};

/// Communication timer: inter-event times lie in [T1, T2].
struct TimerConfig {
  double T1 = 0.0;
  double T2 = 0.0;
  std::variant<SeededSchedule, ExplicitSchedule> schedule = SeededSchedule{};

  void validate() const;
  std::optional<std::uint64_t> seed() const;
};

/// Reset value applied at the jump taken from hybrid index j (0-based).
double next_reset(const TimerConfig& cfg, int j);

struct Horizon {
  double T = 0.0;  // seconds
  int J = 0;       // jumps
};

struct HybridTime {
  double t = 0.0;
  int j = 0;
};

struct Sample {
  double t;
  int j;
  Vector x;
};

struct HybridTimeDomain {
  HybridTime start;
  std::vector<double> jump_times;  // t_1 <= t_2 <= ...
  Horizon horizon;
};

struct HybridSolution {
  HybridTimeDomain domain;
  std::vector<Sample> samples;
  double step = 0.0;
  std::optional<std::uint64_t> seed;

  const Sample& back() const { return samples.back(); }
};

/// Writes dx/dt for state x at hybrid index j. The timer is the last entry of x.
using FlowMap = std::function<void(std::span<const double> x, int j, std::span<double> dx)>;
/// Returns the post-jump state for the jump taken from index j with timer reset `reset`.
using JumpMap = std::function<Vector(std::span<const double> x, int j, double reset)>;

/// Fixed-step RK4 between jumps; inter-jump intervals are exactly the timer values.
HybridSolution simulate(const FlowMap& flow, const JumpMap& jump, Vector x0,
                        const TimerConfig& cfg, Horizon horizon, double step,
                        HybridTime start = {});

/// True iff the dwell-time bounds, t <= T2 (j + 1) and sample ordering all hold.
bool check_domain(const HybridSolution& sol, const TimerConfig& cfg);

}  // namespace hyntp::hybrid
