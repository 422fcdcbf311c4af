// Copyright 2026 hyntp-lab contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <vector>

#include "hyntp/matrix.hpp"

namespace hyntp::numerics {

/// e^A by scaling and squaring with a degree-6 Pade approximant.
Matrix mat_exp(const Matrix& a);

struct EigExtrema {
  double lambda_min;
  double lambda_max;
};

/// Extreme eigenvalues of a symmetric matrix.
EigExtrema sym_eig_extrema(const Matrix& s);

/// All eigenvalues of a symmetric matrix, ascending.
Vector sym_eigenvalues(const Matrix& s);

struct SymEigen {
  Vector values;   // ascending
  Matrix vectors;  // column k pairs with values[k]
};
SymEigen sym_eigen(const Matrix& s);

/// Eigenvalues with multiplicity, sorted by real part then imaginary part.
std::vector<std::complex<double>> spectrum(const Matrix& a);

/// Cholesky test; every pivot must exceed the configured threshold.
bool is_positive_definite(const Matrix& s);

/// (A + A^T) / 2.
Matrix sym_part(const Matrix& a);

/// Relative symmetry test against the configured tolerance.
bool is_symmetric(const Matrix& a);

/// Throws ContractError unless `a` is symmetric within tolerance.
void require_symmetric(const Matrix& a, const char* what);

/// Solves A X = B by LU with partial pivoting.
Matrix solve(const Matrix& a, const Matrix& b);
Matrix inverse(const Matrix& a);

/// Largest singular value.
double spectral_norm(const Matrix& a);

/// Solves A^T X + X A = -Q for X (Kronecker form, small matrices only).
Matrix solve_lyapunov(const Matrix& a, const Matrix& q);

}  // namespace hyntp::numerics
