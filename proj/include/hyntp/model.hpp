// Copyright 2026 hyntp-lab contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>

#include "hyntp/graph.hpp"
#include "hyntp/hybrid.hpp"
#include "hyntp/matrix.hpp"

namespace hyntp::model {

/// Network-wide gains, drifts, topology and timer of the synchronization loop.
struct NetworkParams {
  std::size_t n = 0;
  Vector a;                 // true drift rates
  double h = 0.0;           // consensus memory gain
  double gamma = 0.0;       // consensus gain
  double mu = 0.0;          // estimator gain
  double sigma_star = 1.0;  // desired clock rate
  graph::Digraph graph;
  hybrid::TimerConfig timer;

  void validate() const;
};

/// Full controller/plant state; flat layout (e, u, eta, tau_star, a_hat, tau_hat, tau).
struct ClosedLoopState {
  Vector e, u, eta, tau_star, a_hat, tau_hat;
  double tau = 0.0;

  std::size_t n() const { return e.size(); }
  Vector pack() const;
  static ClosedLoopState unpack(std::span<const double> x, std::size_t n);
};

/// Error-coordinate state; flat layout (e, eta, eps_a, eps_tau, tau).
struct ReducedState {
  Vector e, eta, eps_a, eps_tau;
  double tau = 0.0;

  std::size_t n() const { return e.size(); }
  Vector pack() const;
  static ReducedState unpack(std::span<const double> x, std::size_t n);
};

/// Disagreement-coordinate state; flat layout (z1, z2, w1, w2, tau).
/// z1 = (e_1, eta_1), z2 = (e_2..e_n, eta_2..eta_n) in transformed coordinates,
/// w1 and w2 stack the estimator errors the same way.
struct TransformedState {
  Vector z1, z2, w1, w2;
  double tau = 0.0;

  std::size_t n() const { return z2.size() / 2 + 1; }
  Vector pack() const;
  static TransformedState unpack(std::span<const double> x, std::size_t n);
};

/// Estimator-only subsystem; flat layout (w1, w2, tau).
struct EstimatorState {
  Vector w1, w2;
  double tau = 0.0;

  Vector pack() const;
  static EstimatorState unpack(std::span<const double> x, std::size_t n);
};

/// Block matrices of the transformed system; m = n - 1.
struct SystemMatrices {
  std::size_t n, m;
  double h, gamma, mu;
  Matrix A_f1, A_f2, A_f3, A_f4, B_f1, B_f2, A_g1, A_g2, Lbar;
};

/// Ideal reference r(t) = r0 + sigma_star t; only used to display clocks.
struct ReferenceClock {
  double r0 = 0.0;
  double sigma_star = 1.0;

  double at(double t) const { return r0 + sigma_star * t; }
  Vector adjusted_clocks(std::span<const double> e, double t) const;
};

ClosedLoopState closed_loop_flow(const ClosedLoopState& x, const NetworkParams& p);
/// Consensus update from neighbour clock messages tau_tilde_k = e_k + r.
ClosedLoopState closed_loop_jump(const ClosedLoopState& x, const NetworkParams& p, double reset,
                                 double r = 0.0);

ReducedState reduced_flow(const ReducedState& x, const NetworkParams& p);
ReducedState reduced_jump(const ReducedState& x, const NetworkParams& p, double reset);

TransformedState transformed_flow(const TransformedState& x, const SystemMatrices& m);
TransformedState transformed_jump(const TransformedState& x, const SystemMatrices& m, double reset);

EstimatorState estimator_flow(const EstimatorState& x, const SystemMatrices& m);
EstimatorState estimator_jump(const EstimatorState& x, double reset);

ReducedState reduce_state(const ClosedLoopState& x, const NetworkParams& p);
ClosedLoopState lift_state(const ReducedState& x, std::span<const double> tau_hat,
                           std::span<const double> tau_star, const NetworkParams& p);

TransformedState transform_forward(const ReducedState& x, const graph::DisagreementTransform& tr);
ReducedState transform_inverse(const TransformedState& x, const graph::DisagreementTransform& tr);

enum class GoalSet { A, A_eps, A_tilde, A_tilde_r };

double dist_to_goal(const ClosedLoopState& x, const NetworkParams& p);
double dist_to_goal(const ReducedState& x);
double dist_to_goal(const TransformedState& x);
double dist_to_goal(const EstimatorState& x);
/// Flat-vector form; `n` is the agent count.
double dist_to_goal(std::span<const double> x, GoalSet set, const NetworkParams& p);

SystemMatrices build_system_matrices(const NetworkParams& p, const graph::DisagreementTransform& tr);

/// Flow and jump maps on flat state vectors, ready for hybrid::simulate.
struct System {
  hybrid::FlowMap flow;
  hybrid::JumpMap jump;
};

System closed_loop_system(const NetworkParams& p);
System reduced_system(const NetworkParams& p);
System transformed_system(const SystemMatrices& m);
System estimator_system(const SystemMatrices& m);

/// max_{i,k} |e_i - e_k|.
double disagreement(std::span<const double> e);

}  // namespace hyntp::model
