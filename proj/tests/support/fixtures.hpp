// Copyright 2026 hyntp-lab contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <random>
#include <string>

#include "hyntp/graph.hpp"
#include "hyntp/matrix.hpp"
#include "hyntp/model.hpp"

namespace hyntp::testing {

inline Matrix random_matrix(std::mt19937_64& gen, std::size_t rows, std::size_t cols, double lo = -1.0,
                            double hi = 1.0) {
  std::uniform_real_distribution<double> d(lo, hi);
  Matrix a(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t k = 0; k < cols; ++k) a(i, k) = d(gen);
  return a;
}

inline Vector random_vector(std::mt19937_64& gen, std::size_t n, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> d(lo, hi);
  Vector v(n);
  for (double& x : v) x = d(gen);
  return v;
}

inline graph::Digraph five_agent_graph() {
  return graph::Digraph::from_adjacency({{0, 1, 1, 0, 1},
                                         {1, 0, 1, 0, 0},
                                         {1, 0, 0, 1, 0},
                                         {0, 0, 1, 0, 1},
                                         {1, 0, 1, 1, 0}});
}

inline graph::Digraph four_agent_ring() {
  return graph::Digraph::from_adjacency({{0, 1, 0, 1}, {1, 0, 1, 0}, {0, 1, 0, 1}, {1, 0, 1, 0}});
}

inline graph::Digraph directed_cycle(std::size_t n) {
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t i = 0; i < n; ++i) edges.emplace_back(i, (i + n - 1) % n);
  return graph::Digraph::from_edges(n, edges);
}

inline graph::Digraph complete_graph(std::size_t n) {
  Matrix a(n, n, 1.0);
  for (std::size_t i = 0; i < n; ++i) a(i, i) = 0.0;
  return graph::Digraph::from_adjacency(a);
}

inline model::NetworkParams five_agent_params(std::uint64_t seed = 1) {
  model::NetworkParams p;
  p.graph = five_agent_graph();
  p.n = 5;
  p.a = {0.93, 1.08, 0.87, 1.12, 1.01};
  p.h = -1.3;
  p.gamma = 0.125;
  p.mu = 3.0;
  p.sigma_star = 1.0;
  p.timer = {0.01, 0.1, hybrid::SeededSchedule{seed}};
  return p;
}

inline model::ClosedLoopState five_agent_initial(const model::NetworkParams& p) {
  model::ClosedLoopState x;
  x.e = {1, -1, 2, -2, 0};
  x.eta = {0, -3, 1, -4, -1};
  x.tau_star = Vector(p.n, 0.0);
  x.a_hat = Vector(p.n, 1.0);
  x.tau_hat = Vector(p.n, 0.0);
  x.u.resize(p.n);
  for (std::size_t i = 0; i < p.n; ++i) x.u[i] = x.eta[i] - x.a_hat[i] + p.sigma_star;
  x.tau = 0.05;
  return x;
}

inline std::string scenario_path(const std::string& name) {
  return std::string(HYNTP_SCENARIO_DIR) + "/" + name;
}

}  // namespace hyntp::testing
