// Copyright 2026 hyntp-lab contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "hyntp/certify.hpp"
#include "hyntp/graph.hpp"
#include "hyntp/hybrid.hpp"
#include "hyntp/model.hpp"

namespace hyntp::robustness {

enum class NoiseKind {
  comm,          // additive error on every transmitted clock, drawn per jump
  drift_output,  // additive error on each internal clock reading, held between jumps
  sigma_ref,     // per-agent error on the desired rate, held between jumps
};

struct UniformNoise {
  double lo = 0.0;
  double hi = 1.0;
};

struct ConstantNoise {
  double value = 0.0;
};

/// Agent-level samples are amplitude * draw, with draw from the distribution.
struct NoiseConfig {
  NoiseKind kind = NoiseKind::comm;
  double amplitude = 0.0;
  std::variant<UniformNoise, ConstantNoise> distribution = UniformNoise{};
  std::uint64_t seed = 0;

  void validate() const;
};

/// Agent-level noise vector for hybrid index j; a pure function of (config, j).
Vector sample_noise(const NoiseConfig& noise, int j, std::size_t n);

struct PerturbationMatrices {
  Matrix B_g;   // 2m x m, [0; gamma Lbar]
  Matrix B_m1;  // 2 x 2, [[mu, 0], [0, 1]]
  Matrix B_m2;  // 2m x 2m, [[mu I, 0], [0, I]]
};

PerturbationMatrices build_perturbation_matrices(const model::SystemMatrices& m);

/// Jump with noisy clock messages; m_bar is T^{-1} times the agent-level noise.
model::TransformedState perturbed_jump_comm(const model::TransformedState& chi,
                                            const model::SystemMatrices& m,
                                            const PerturbationMatrices& pm,
                                            std::span<const double> m_bar, double reset);

/// Input of the estimator flow for agent-level clock-output noise:
/// q1 = (-m_1, m_1), q2 = (-m_2..n, m_2..n) with m_bar = T^{-1} m.
Vector drift_noise_input(std::span<const double> m_bar);

/// Estimator flow with the additive input (B_m1 q1, B_m2 q2).
model::EstimatorState perturbed_estimator_flow(const model::EstimatorState& w,
                                               const model::SystemMatrices& m,
                                               const PerturbationMatrices& pm,
                                               std::span<const double> q_bar);

/// Transformed flow with the rate error T^{-1} eps_sigma added to the clock errors.
model::TransformedState perturbed_sigma_flow(const model::TransformedState& chi,
                                             const model::SystemMatrices& m,
                                             std::span<const double> m_sigma_bar);

/// Flat-vector transformed system under the configured perturbation.
model::System perturbed_system(const model::SystemMatrices& m, const graph::DisagreementTransform& tr,
                               const NoiseConfig& noise);

struct IssTrial {
  std::uint64_t noise_seed = 0;
  double steady_state_error = 0.0;
  double max_error = 0.0;
  Vector t;             // sample times
  Vector disagreement;  // max_{i,k} |e_i - e_k| at each sample
};

struct IssResult {
  double steady_state_error = 0.0;  // mean over trials
  double max_error = 0.0;           // max over trials
  std::vector<IssTrial> trials;
};

/// Runs `trials` seeded perturbed simulations from `initial`; trial k uses
/// noise seed noise.seed + k and, for seeded timers, timer seed + k.
/// steady_state_error of a trial is the mean disagreement over the last quarter
/// of the horizon; max_error is its maximum over the same window.
IssResult iss_experiment(const model::NetworkParams& p, const certify::Certificate& c,
                         const NoiseConfig& noise, const model::ReducedState& initial,
                         hybrid::Horizon horizon, int trials, double step,
                         certify::Exec exec = certify::Exec::parallel);

}  // namespace hyntp::robustness
