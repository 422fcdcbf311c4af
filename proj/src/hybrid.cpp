// Copyright 2026 hyntp-lab contributors
// SPDX-License-Identifier: Apache-2.0

#include "hyntp/hybrid.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "hyntp/error.hpp"
#include "hyntp/tolerances.hpp"

namespace hyntp::hybrid {

namespace {

// Uniform [0, 1) draw keyed by (seed, j); independent of any other draw.
double keyed_uniform(std::uint64_t seed, int j) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(j), 0x7469u};
  std::mt19937_64 gen(seq);
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

bool finite(std::span<const double> x) {
  for (double v : x)
    if (!std::isfinite(v)) return false;
  return true;
}

}  // namespace

void TimerConfig::validate() const {
  if (!(T1 > 0.0)) throw ContractError("timer: T1 must be positive");
  if (!(T2 >= T1)) throw ContractError("timer: T2 must be at least T1");
  if (const auto* ex = std::get_if<ExplicitSchedule>(&schedule)) {
    for (double r : ex->resets) {
      if (!(r >= T1 && r <= T2)) {
        throw ContractError("timer: explicit reset " + std::to_string(r) + " outside [T1, T2]");
      }
    }
  }
}

std::optional<std::uint64_t> TimerConfig::seed() const {
  if (const auto* s = std::get_if<SeededSchedule>(&schedule)) return s->seed;
  return std::nullopt;
}

double next_reset(const TimerConfig& cfg, int j) {
  if (j < 0) throw ContractError("next_reset: negative jump index");
  if (const auto* ex = std::get_if<ExplicitSchedule>(&cfg.schedule)) {
    if (static_cast<std::size_t>(j) >= ex->resets.size()) {
      throw ScheduleExhausted("explicit schedule has " + std::to_string(ex->resets.size()) +
                              " resets, jump " + std::to_string(j) + " requested");
    }
    return ex->resets[static_cast<std::size_t>(j)];
  }
  if (cfg.T1 == cfg.T2) return cfg.T1;
  const auto& seeded = std::get<SeededSchedule>(cfg.schedule);
  return cfg.T1 + keyed_uniform(seeded.seed, j) * (cfg.T2 - cfg.T1);
}

HybridSolution simulate(const FlowMap& flow, const JumpMap& jump, Vector x0,
                        const TimerConfig& cfg, Horizon horizon, double step, HybridTime start) {
  cfg.validate();
  if (!(step > 0.0)) throw PreconditionError("simulate: step must be positive");
  if (x0.empty()) throw DimensionError("simulate: empty state");
  const double tau0 = x0.back();
  if (!(tau0 >= 0.0 && tau0 <= cfg.T2 + kTol.domain)) {
    throw PreconditionError("simulate: initial timer outside [0, T2]");
  }
  if (!finite(x0)) throw NumericalBlowup(start.t, start.j);

  const std::size_t dim = x0.size();
  HybridSolution sol;
  sol.domain.start = start;
  sol.domain.horizon = horizon;
  sol.step = step;
  sol.seed = cfg.seed();

  double t = start.t;
  int j = start.j;
  Vector x = std::move(x0);
  Vector k1(dim), k2(dim), k3(dim), k4(dim), tmp(dim);
  sol.samples.push_back({t, j, x});

  while (true) {
    const double tau = x.back();
    const double remaining = horizon.T - t;
    if (remaining <= 0.0 && tau > 0.0) break;
    const bool reaches_jump = tau <= remaining;
    const double span = reaches_jump ? tau : remaining;

    if (span > 0.0) {
      const double t_start = t;
      const long steps = std::max(1L, static_cast<long>(std::ceil(span / step - 1e-9)));
      for (long k = 1; k <= steps; ++k) {
        const double t_next = (k == steps) ? t_start + span : t_start + static_cast<double>(k) * step;
        const double h = t_next - t;
        flow(x, j, k1);
        for (std::size_t i = 0; i < dim; ++i) tmp[i] = x[i] + 0.5 * h * k1[i];
        flow(tmp, j, k2);
        for (std::size_t i = 0; i < dim; ++i) tmp[i] = x[i] + 0.5 * h * k2[i];
        flow(tmp, j, k3);
        for (std::size_t i = 0; i < dim; ++i) tmp[i] = x[i] + h * k3[i];
        flow(tmp, j, k4);
        for (std::size_t i = 0; i < dim; ++i)
          x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        // The timer decreases at unit rate; pin it to the exact schedule.
        x.back() = (k == steps && reaches_jump) ? 0.0 : tau - (t_next - t_start);
        t = t_next;
        if (!finite(x)) throw NumericalBlowup(t, j);
        sol.samples.push_back({t, j, x});
      }
    }

    if (!reaches_jump || j - start.j >= horizon.J) break;
    x.back() = 0.0;
    const double reset = next_reset(cfg, j);
    x = jump(x, j, reset);
    if (x.size() != dim) throw DimensionError("simulate: jump map changed state dimension");
    x.back() = reset;
    ++j;
    if (!finite(x)) throw NumericalBlowup(t, j);
    sol.domain.jump_times.push_back(t);
    sol.samples.push_back({t, j, x});
  }
  return sol;
}

bool check_domain(const HybridSolution& sol, const TimerConfig& cfg) {
  const double tol = kTol.domain;
  const auto& jt = sol.domain.jump_times;
  const HybridTime s = sol.domain.start;
  double prev = s.t;
  for (std::size_t k = 0; k < jt.size(); ++k) {
    const double gap = jt[k] - prev;
    const double lo = (k == 0) ? 0.0 : cfg.T1;
    if (gap < lo - tol || gap > cfg.T2 + tol) return false;
    prev = jt[k];
  }
  for (std::size_t k = 0; k < sol.samples.size(); ++k) {
    const Sample& p = sol.samples[k];
    if (p.t - s.t > cfg.T2 * (p.j - s.j + 1) + tol) return false;
    if (k == 0) continue;
    const Sample& q = sol.samples[k - 1];
    if (p.j == q.j) {
      if (!(p.t > q.t)) return false;
    } else {
      // A jump: same instant, index advanced by one, and recorded in the domain.
      if (p.j != q.j + 1 || p.t != q.t) return false;
      const auto idx = static_cast<std::size_t>(p.j - s.j - 1);
      if (idx >= jt.size() || jt[idx] != p.t) return false;
    }
  }
  return true;
}

}  // namespace hyntp::hybrid
