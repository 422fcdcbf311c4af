// Copyright 2026 hyntp-lab contributors
// SPDX-License-Identifier: Apache-2.0

#include "hyntp/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hyntp/error.hpp"
#include "hyntp/tolerances.hpp"

namespace hyntp::model {

namespace {

void require_length(std::span<const double> x, std::size_t len, const char* what) {
  if (x.size() != len) {
    throw DimensionError(std::string(what) + ": expected " + std::to_string(len) +
                         " entries, got " + std::to_string(x.size()));
  }
}

std::span<const double> part(std::span<const double> x, std::size_t block, std::size_t n) {
  return x.subspan(block * n, n);
}

void require_jump_set(double tau) {
  if (std::abs(tau) > kTol.jump_timer) {
    throw ContractError("jump taken with timer " + std::to_string(tau) + " > 0");
  }
}

void closed_loop_flow_flat(std::span<const double> x, const NetworkParams& p, std::span<double> dx) {
  const std::size_t n = p.n;
  auto u = part(x, 1, n);
  auto eta = part(x, 2, n);
  auto ts = part(x, 3, n);
  auto ah = part(x, 4, n);
  auto th = part(x, 5, n);
  for (std::size_t i = 0; i < n; ++i) {
    const double eps_tau = th[i] - ts[i];
    dx[i] = p.a[i] + u[i] - p.sigma_star;
    // Keeps u - eta + a_hat constant between events.
    dx[n + i] = p.h * eta[i] + p.mu * eps_tau;
    dx[2 * n + i] = p.h * eta[i];
    dx[3 * n + i] = p.a[i];
    dx[4 * n + i] = -p.mu * eps_tau;
    dx[5 * n + i] = ah[i] - eps_tau;
  }
  dx[6 * n] = -1.0;
}

void reduced_flow_flat(std::span<const double> x, const NetworkParams& p, std::span<double> dx) {
  const std::size_t n = p.n;
  auto eta = part(x, 1, n);
  auto ea = part(x, 2, n);
  auto et = part(x, 3, n);
  for (std::size_t i = 0; i < n; ++i) {
    dx[i] = eta[i] + ea[i];
    dx[n + i] = p.h * eta[i];
    dx[2 * n + i] = p.mu * et[i];
    dx[3 * n + i] = -et[i] - ea[i];
  }
  dx[4 * n] = -1.0;
}

Vector reduced_jump_flat(std::span<const double> x, const NetworkParams& p, const Matrix& l,
                         double reset) {
  const std::size_t n = p.n;
  require_jump_set(x[4 * n]);
  Vector out(x.begin(), x.end());
  const Vector le = l * part(x, 0, n);
  for (std::size_t i = 0; i < n; ++i) out[n + i] = -p.gamma * le[i];
  out[4 * n] = reset;
  return out;
}

// y = A x + B w on consecutive sub-spans.
void affine_block(const Matrix& a, std::span<const double> x, const Matrix* b,
                  std::span<const double> w, std::span<double> y) {
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.cols(); ++k) s += a(i, k) * x[k];
    if (b != nullptr)
      for (std::size_t k = 0; k < b->cols(); ++k) s += (*b)(i, k) * w[k];
    y[i] = s;
  }
}

void transformed_flow_flat(std::span<const double> x, const SystemMatrices& m, std::span<double> dx) {
  const std::size_t m2 = 2 * m.m;
  auto z1 = x.subspan(0, 2);
  auto z2 = x.subspan(2, m2);
  auto w1 = x.subspan(2 + m2, 2);
  auto w2 = x.subspan(4 + m2, m2);
  affine_block(m.A_f1, z1, &m.B_f1, w1, dx.subspan(0, 2));
  affine_block(m.A_f2, z2, &m.B_f2, w2, dx.subspan(2, m2));
  affine_block(m.A_f3, w1, nullptr, {}, dx.subspan(2 + m2, 2));
  affine_block(m.A_f4, w2, nullptr, {}, dx.subspan(4 + m2, m2));
  dx[4 + 2 * m2] = -1.0;
}

Vector transformed_jump_flat(std::span<const double> x, const SystemMatrices& m, double reset) {
  const std::size_t m2 = 2 * m.m;
  require_jump_set(x[4 + 2 * m2]);
  Vector out(x.begin(), x.end());
  affine_block(m.A_g1, x.subspan(0, 2), nullptr, {}, std::span<double>(out).subspan(0, 2));
  affine_block(m.A_g2, x.subspan(2, m2), nullptr, {}, std::span<double>(out).subspan(2, m2));
  out[4 + 2 * m2] = reset;
  return out;
}

void estimator_flow_flat(std::span<const double> x, const SystemMatrices& m, std::span<double> dx) {
  const std::size_t m2 = 2 * m.m;
  affine_block(m.A_f3, x.subspan(0, 2), nullptr, {}, dx.subspan(0, 2));
  affine_block(m.A_f4, x.subspan(2, m2), nullptr, {}, dx.subspan(2, m2));
  dx[2 + m2] = -1.0;
}

Vector tail(std::span<const double> v) { return Vector(v.begin() + 1, v.end()); }

double sq(double v) { return v * v; }

double sum_sq(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return s;
}

// |e - mean(e) 1|^2.
double consensus_residual_sq(std::span<const double> e) {
  double mean = 0.0;
  for (double v : e) mean += v;
  mean /= static_cast<double>(e.size());
  double s = 0.0;
  for (double v : e) s += sq(v - mean);
  return s;
}

}  // namespace

void NetworkParams::validate() const {
  if (n != graph.size()) throw ContractError("params: n does not match the graph size");
  if (a.size() != n) throw ContractError("params: drift vector length must equal n");
  if (!(gamma > 0.0)) throw ContractError("params: gamma must be positive");
  if (!(mu > 0.0)) throw ContractError("params: mu must be positive");
  if (!(sigma_star > 0.0)) throw ContractError("params: sigma_star must be positive");
  if (!std::isfinite(h)) throw ContractError("params: h must be finite");
  timer.validate();
}

Vector ClosedLoopState::pack() const {
  Vector x = vec::concat({e, u, eta, tau_star, a_hat, tau_hat});
  x.push_back(tau);
  return x;
}

ClosedLoopState ClosedLoopState::unpack(std::span<const double> x, std::size_t n) {
  require_length(x, 6 * n + 1, "ClosedLoopState");
  auto get = [&](std::size_t b) {
    auto s = part(x, b, n);
    return Vector(s.begin(), s.end());
  };
  return {get(0), get(1), get(2), get(3), get(4), get(5), x[6 * n]};
}

Vector ReducedState::pack() const {
  Vector x = vec::concat({e, eta, eps_a, eps_tau});
  x.push_back(tau);
  return x;
}

ReducedState ReducedState::unpack(std::span<const double> x, std::size_t n) {
  require_length(x, 4 * n + 1, "ReducedState");
  auto get = [&](std::size_t b) {
    auto s = part(x, b, n);
    return Vector(s.begin(), s.end());
  };
  return {get(0), get(1), get(2), get(3), x[4 * n]};
}

Vector TransformedState::pack() const {
  Vector x = vec::concat({z1, z2, w1, w2});
  x.push_back(tau);
  return x;
}

TransformedState TransformedState::unpack(std::span<const double> x, std::size_t n) {
  require_length(x, 4 * n + 1, "TransformedState");
  const std::size_t m2 = 2 * (n - 1);
  auto get = [&](std::size_t off, std::size_t len) {
    auto s = x.subspan(off, len);
    return Vector(s.begin(), s.end());
  };
  return {get(0, 2), get(2, m2), get(2 + m2, 2), get(4 + m2, m2), x[4 + 2 * m2]};
}

Vector EstimatorState::pack() const {
  Vector x = vec::concat({w1, w2});
  x.push_back(tau);
  return x;
}

EstimatorState EstimatorState::unpack(std::span<const double> x, std::size_t n) {
  require_length(x, 2 * n + 1, "EstimatorState");
  const std::size_t m2 = 2 * (n - 1);
  return {Vector(x.begin(), x.begin() + 2), Vector(x.begin() + 2, x.begin() + 2 + m2), x[2 + m2]};
}

Vector ReferenceClock::adjusted_clocks(std::span<const double> e, double t) const {
  Vector out(e.size());
  const double r = at(t);
  for (std::size_t i = 0; i < e.size(); ++i) out[i] = e[i] + r;
  return out;
}

ClosedLoopState closed_loop_flow(const ClosedLoopState& x, const NetworkParams& p) {
  const Vector flat = x.pack();
  require_length(flat, 6 * p.n + 1, "closed_loop_flow");
  Vector dx(flat.size());
  closed_loop_flow_flat(flat, p, dx);
  return ClosedLoopState::unpack(dx, p.n);
}

ClosedLoopState closed_loop_jump(const ClosedLoopState& x, const NetworkParams& p, double reset,
                                 double r) {
  require_length(x.pack(), 6 * p.n + 1, "closed_loop_jump");
  require_jump_set(x.tau);
  const std::size_t n = p.n;
  // Each agent only sees the clocks of its neighbours.
  Vector clocks(n);
  for (std::size_t i = 0; i < n; ++i) clocks[i] = x.e[i] + r;
  ClosedLoopState out = x;
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t k : p.graph.neighbours(i)) s += clocks[i] - clocks[k];
    out.eta[i] = -p.gamma * s;
  }
  const Vector le = graph::laplacian(p.graph) * x.e;
  const double scale = std::max(1.0, vec::max_abs(clocks)) * static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(out.eta[i] + p.gamma * le[i]) > kTol.distributed_update * scale * p.gamma) {
      throw ContractError("distributed consensus update disagrees with -gamma L e");
    }
    out.u[i] = out.eta[i] - x.a_hat[i] + p.sigma_star;
  }
  out.tau = reset;
  return out;
}

ReducedState reduced_flow(const ReducedState& x, const NetworkParams& p) {
  const Vector flat = x.pack();
  require_length(flat, 4 * p.n + 1, "reduced_flow");
  Vector dx(flat.size());
  reduced_flow_flat(flat, p, dx);
  return ReducedState::unpack(dx, p.n);
}

ReducedState reduced_jump(const ReducedState& x, const NetworkParams& p, double reset) {
  const Vector flat = x.pack();
  require_length(flat, 4 * p.n + 1, "reduced_jump");
  return ReducedState::unpack(reduced_jump_flat(flat, p, graph::laplacian(p.graph), reset), p.n);
}

TransformedState transformed_flow(const TransformedState& x, const SystemMatrices& m) {
  const Vector flat = x.pack();
  require_length(flat, 4 * m.n + 1, "transformed_flow");
  Vector dx(flat.size());
  transformed_flow_flat(flat, m, dx);
  return TransformedState::unpack(dx, m.n);
}

TransformedState transformed_jump(const TransformedState& x, const SystemMatrices& m, double reset) {
  const Vector flat = x.pack();
  require_length(flat, 4 * m.n + 1, "transformed_jump");
  return TransformedState::unpack(transformed_jump_flat(flat, m, reset), m.n);
}

EstimatorState estimator_flow(const EstimatorState& x, const SystemMatrices& m) {
  const Vector flat = x.pack();
  require_length(flat, 2 * m.n + 1, "estimator_flow");
  Vector dx(flat.size());
  estimator_flow_flat(flat, m, dx);
  return EstimatorState::unpack(dx, m.n);
}

EstimatorState estimator_jump(const EstimatorState& x, double reset) {
  require_jump_set(x.tau);
  EstimatorState out = x;
  out.tau = reset;
  return out;
}

ReducedState reduce_state(const ClosedLoopState& x, const NetworkParams& p) {
  return {x.e, x.eta, vec::sub(p.a, x.a_hat), vec::sub(x.tau_hat, x.tau_star), x.tau};
}

ClosedLoopState lift_state(const ReducedState& x, std::span<const double> tau_hat,
                           std::span<const double> tau_star, const NetworkParams& p) {
  const std::size_t n = p.n;
  require_length(tau_hat, n, "lift_state tau_hat");
  require_length(tau_star, n, "lift_state tau_star");
  ClosedLoopState out;
  out.e = x.e;
  out.eta = x.eta;
  out.u.resize(n);
  out.tau_star.resize(n);
  out.a_hat.resize(n);
  out.tau_hat.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.a_hat[i] = p.a[i] - x.eps_a[i];
    out.u[i] = x.eta[i] - out.a_hat[i] + p.sigma_star;
    out.tau_star[i] = tau_hat[i] - x.eps_tau[i];
    out.tau_hat[i] = x.eps_tau[i] + tau_star[i];
  }
  out.tau = x.tau;
  return out;
}

TransformedState transform_forward(const ReducedState& x, const graph::DisagreementTransform& tr) {
  const std::size_t n = tr.T.rows();
  if (x.n() != n) throw DimensionError("transform_forward: state size does not match transform");
  const Vector e = tr.T_inv * x.e;
  const Vector eta = tr.T_inv * x.eta;
  const Vector ea = tr.T_inv * x.eps_a;
  const Vector et = tr.T_inv * x.eps_tau;
  return {{e[0], eta[0]}, vec::concat({tail(e), tail(eta)}), {ea[0], et[0]},
          vec::concat({tail(ea), tail(et)}), x.tau};
}

ReducedState transform_inverse(const TransformedState& x, const graph::DisagreementTransform& tr) {
  const std::size_t n = tr.T.rows();
  if (x.z2.size() != 2 * (n - 1) || x.w2.size() != 2 * (n - 1) || x.z1.size() != 2 ||
      x.w1.size() != 2) {
    throw DimensionError("transform_inverse: state size does not match transform");
  }
  const std::size_t m = n - 1;
  auto stack = [&](double first, const Vector& rest, std::size_t off) {
    Vector v(n);
    v[0] = first;
    for (std::size_t i = 0; i < m; ++i) v[i + 1] = rest[off + i];
    return tr.T * v;
  };
  return {stack(x.z1[0], x.z2, 0), stack(x.z1[1], x.z2, m), stack(x.w1[0], x.w2, 0),
          stack(x.w1[1], x.w2, m), x.tau};
}

double dist_to_goal(const ClosedLoopState& x, const NetworkParams& p) {
  double s = consensus_residual_sq(x.e) + sum_sq(x.eta);
  for (std::size_t i = 0; i < x.n(); ++i) {
    s += sq(x.u[i] - x.eta[i] + x.a_hat[i] - p.sigma_star);
    s += sq(x.a_hat[i] - p.a[i]);
    s += sq(x.tau_hat[i] - x.tau_star[i]);
  }
  return std::sqrt(s);
}

double dist_to_goal(const ReducedState& x) {
  return std::sqrt(consensus_residual_sq(x.e) + sum_sq(x.eta) + sum_sq(x.eps_a) +
                   sum_sq(x.eps_tau));
}

double dist_to_goal(const TransformedState& x) {
  return std::sqrt(sq(x.z1[1]) + sum_sq(x.z2) + sum_sq(x.w1) + sum_sq(x.w2));
}

double dist_to_goal(const EstimatorState& x) { return std::sqrt(sum_sq(x.w1) + sum_sq(x.w2)); }

double dist_to_goal(std::span<const double> x, GoalSet set, const NetworkParams& p) {
  switch (set) {
    case GoalSet::A:
      return dist_to_goal(ClosedLoopState::unpack(x, p.n), p);
    case GoalSet::A_eps:
      return dist_to_goal(ReducedState::unpack(x, p.n));
    case GoalSet::A_tilde:
      return dist_to_goal(TransformedState::unpack(x, p.n));
    case GoalSet::A_tilde_r:
      return dist_to_goal(EstimatorState::unpack(x, p.n));
  }
  return 0.0;
}

SystemMatrices build_system_matrices(const NetworkParams& p, const graph::DisagreementTransform& tr) {
  const std::size_t n = p.n;
  if (tr.T.rows() != n) throw DimensionError("build_system_matrices: transform size mismatch");
  const std::size_t m = n - 1;
  const Matrix id = Matrix::identity(m);
  SystemMatrices s{n, m, p.h, p.gamma, p.mu, {}, {}, {}, {}, {}, {}, {}, {}, tr.Lbar};
  s.A_f1 = {{0.0, 1.0}, {0.0, p.h}};
  s.A_f3 = {{0.0, p.mu}, {-1.0, -1.0}};
  s.B_f1 = {{1.0, 0.0}, {0.0, 0.0}};
  s.A_g1 = {{1.0, 0.0}, {0.0, 0.0}};
  s.A_f2 = Matrix(2 * m, 2 * m);
  s.A_f2.set_block(0, m, id);
  s.A_f2.set_block(m, m, id * p.h);
  s.A_f4 = Matrix(2 * m, 2 * m);
  s.A_f4.set_block(0, m, id * p.mu);
  s.A_f4.set_block(m, 0, -id);
  s.A_f4.set_block(m, m, -id);
  s.B_f2 = Matrix(2 * m, 2 * m);
  s.B_f2.set_block(0, 0, id);
  s.A_g2 = Matrix(2 * m, 2 * m);
  s.A_g2.set_block(0, 0, id);
  s.A_g2.set_block(m, 0, tr.Lbar * (-p.gamma));
  return s;
}

System closed_loop_system(const NetworkParams& p) {
  return {[p](std::span<const double> x, int, std::span<double> dx) { closed_loop_flow_flat(x, p, dx); },
          [p](std::span<const double> x, int, double reset) {
            return closed_loop_jump(ClosedLoopState::unpack(x, p.n), p, reset).pack();
          }};
}

System reduced_system(const NetworkParams& p) {
  const Matrix l = graph::laplacian(p.graph);
  return {[p](std::span<const double> x, int, std::span<double> dx) { reduced_flow_flat(x, p, dx); },
          [p, l](std::span<const double> x, int, double reset) {
            return reduced_jump_flat(x, p, l, reset);
          }};
}

System transformed_system(const SystemMatrices& m) {
  return {[m](std::span<const double> x, int, std::span<double> dx) { transformed_flow_flat(x, m, dx); },
          [m](std::span<const double> x, int, double reset) {
            return transformed_jump_flat(x, m, reset);
          }};
}

System estimator_system(const SystemMatrices& m) {
  return {[m](std::span<const double> x, int, std::span<double> dx) { estimator_flow_flat(x, m, dx); },
          [m](std::span<const double> x, int, double reset) {
            require_jump_set(x.back());
            Vector out(x.begin(), x.end());
            out.back() = reset;
            return out;
          }};
}

double disagreement(std::span<const double> e) {
  if (e.empty()) return 0.0;
  const auto [lo, hi] = std::minmax_element(e.begin(), e.end());
  return *hi - *lo;
}

}  // namespace hyntp::model
