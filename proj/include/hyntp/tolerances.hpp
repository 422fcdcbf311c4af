// Copyright 2026 hyntp-lab contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

namespace hyntp {

/// Every numerical threshold used by the library, in one place.
struct Tolerances {
  // Relative asymmetry allowed before a matrix is rejected as non-symmetric.
  double symmetry = 1e-10;
  // Cholesky pivots at or below this value mean "not positive definite".
  double pd_pivot = 1e-12;
  // Jacobi stops once the off-diagonal mass falls below this fraction of the total.
  double jacobi_offdiag = 1e-15;
  int jacobi_max_sweeps = 100;
  // Francis QR iteration budget per deflated eigenvalue.
  int qr_max_iterations = 60;
  // Eigenvalues closer than this (relative to max(1, |lambda|)) form one cluster.
  double eig_cluster = 1e-6;
  // Relative pivot threshold when computing eigenvector null spaces.
  double null_space = 1e-9;
  // Acceptance thresholds of the disagreement transform invariants.
  double transform_inverse = 1e-9;
  double transform_block = 1e-8;
  // Timer value regarded as zero when a jump is taken.
  double jump_timer = 1e-12;
  // Allowed gap between distributed and matrix forms of the consensus update.
  double distributed_update = 1e-9;
  // Slack on dwell-time checks of hybrid time domains.
  double domain = 1e-9;
};

inline constexpr Tolerances kTol{};

}  // namespace hyntp
