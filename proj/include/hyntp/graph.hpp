// Copyright 2026 hyntp-lab contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "hyntp/matrix.hpp"

namespace hyntp::graph {

/// Unweighted digraph. Entry (i, k) = 1 means agent i receives the clock of agent k,
/// so the neighbour set of i is {k : a_ik = 1}.
class Digraph {
 public:
  /// Empty placeholder with no agents; fails every validation.
  Digraph() = default;
  /// Validates a 0/1 matrix with zero diagonal and n >= 2.
  static Digraph from_adjacency(const Matrix& adjacency);
  /// Each pair (i, k) sets a_ik = 1; indices are 0-based.
  static Digraph from_edges(std::size_t n,
                            const std::vector<std::pair<std::size_t, std::size_t>>& edges);

  std::size_t size() const { return n_; }
  const Matrix& adjacency() const { return adjacency_; }
  bool has_edge(std::size_t i, std::size_t k) const { return adjacency_(i, k) != 0.0; }
  std::vector<std::size_t> neighbours(std::size_t i) const;
  /// Row sum of the adjacency matrix (number of clocks agent i listens to).
  std::size_t in_degree(std::size_t i) const;
  /// Column sum of the adjacency matrix (number of agents listening to i).
  std::size_t out_degree(std::size_t i) const;

 private:
  Digraph(std::size_t n, Matrix adjacency) : n_(n), adjacency_(std::move(adjacency)) {}
  std::size_t n_ = 0;
  Matrix adjacency_;
};

/// L = D - A with D the diagonal of in-degrees; L * 1 = 0.
Matrix laplacian(const Digraph& g);

bool is_strongly_connected(const Digraph& g);

struct Classification {
  bool balanced;
  bool complete;
  std::size_t max_in_degree;
  std::size_t min_in_degree;
};
Classification classify(const Digraph& g);

/// Change of basis separating consensus from disagreement coordinates.
struct DisagreementTransform {
  Matrix T;      // first column 1/sqrt(n) * 1, then eigenvector columns of L
  Matrix T_inv;
  Matrix Lbar;   // real (block) diagonal form of the nonzero spectrum
  bool spectrum_real;
};

DisagreementTransform disagreement_transform(const Digraph& g);

/// diag(T, T, T, T, 1) acting on stacked (e, eta, eps_a, eps_tau, tau).
Matrix gamma_matrix(const DisagreementTransform& tr);

}  // namespace hyntp::graph
