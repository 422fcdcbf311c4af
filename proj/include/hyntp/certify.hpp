// Copyright 2026 hyntp-lab contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>

#include "hyntp/matrix.hpp"
#include "hyntp/model.hpp"

namespace hyntp::certify {

/// Serial reference loop or OpenMP-parallel loop; both give identical results.
enum class Exec { serial, parallel };

/// Candidate Lyapunov certificate.
struct Certificate {
  Matrix P1;  // 2m x 2m, weights the disagreement block
  Matrix P2;  // 2 x 2, weights the consensus-direction estimator errors
  Matrix P3;  // 2m x 2m, weights the remaining estimator errors
  double epsilon_young = 1.0;
  double gamma_split = 0.5;
  std::size_t nu_grid_points = 2001;

  /// Shapes for n agents, symmetry, positive definiteness and scalar ranges.
  void validate(std::size_t n) const;
};

struct CertificateReport {
  bool flow_lmis_ok = false;
  bool jump_contraction_ok = false;
  bool growth_ok = false;
  bool ok = false;

  double beta1 = 0.0, beta2 = 0.0;
  double kappa1 = 0.0, kappa2 = 0.0;
  double kappa_bar1 = 0.0, kappa_bar2 = 0.0;
  double alpha1 = 0.0, alpha2 = 0.0;
  double alpha_w1 = 0.0, alpha_w2 = 0.0;
  double beta_tilde = 0.0, gamma_bar = 0.0;
  double growth_factor = 0.0;
  double worst_nu = 0.0;

  // Diagnostics.
  double max_jump_eigenvalue = 0.0;    // max over the grid of lambda_max S(nu)
  double kappa2_lambda_min_sup = 0.0;  // 0.99 * (-min over the grid of lambda_min S(nu))
  double T1 = 0.0, T2 = 0.0;
  double epsilon_young = 0.0;
  bool spectrum_real = true;
};

struct FlowLmiResult {
  bool ok;
  double beta1;
  double beta2;
};

struct JumpContractionResult {
  bool ok;
  double kappa2;
  double worst_nu;
  double max_lambda_max;
  double kappa2_lambda_min_sup;
};

struct GrowthResult {
  bool ok;
  double growth_factor;
};

/// Uniform grid of `points` values covering [lo, hi].
Vector uniform_grid(double lo, double hi, std::size_t points);

struct GridExtrema {
  Vector lambda_min;
  Vector lambda_max;
};

/// Eigenvalue extrema of e^{A^T nu} P e^{A nu} at every grid point.
GridExtrema weighted_grid(const Matrix& a, const Matrix& p, std::span<const double> nus, Exec exec);

/// Eigenvalue extrema of G^T e^{A^T nu} P e^{A nu} G - P at every grid point.
GridExtrema jump_grid(const Matrix& a, const Matrix& g, const Matrix& p,
                      std::span<const double> nus, Exec exec);

FlowLmiResult check_flow_lmis(const model::SystemMatrices& m, const Certificate& c);

JumpContractionResult check_jump_contraction(const model::SystemMatrices& m, const Certificate& c,
                                             double T1, double T2, Exec exec = Exec::parallel);

CertificateReport compute_constants(const model::SystemMatrices& m, const Certificate& c, double T1,
                                    double T2, const FlowLmiResult& flow,
                                    const JumpContractionResult& jump, Exec exec = Exec::parallel);

GrowthResult check_growth_condition(const CertificateReport& r);

/// V = e^{2 h tau} eta_1^2 + z2^T e^{A^T tau} P1 e^{A tau} z2 + w1^T P2 w1 + w2^T P3 w2.
double lyapunov_value(const model::TransformedState& chi, const model::SystemMatrices& m,
                      const Certificate& c);

/// Square root of the V envelope:
/// sqrt(exp(k1 T2 / a2) * (g^j V0 + k2 * estimator_bound^2)), g the growth factor.
double theorem_bound(const CertificateReport& r, double V0, double w0_norm, double t, int j);

/// Bound on the distance to the goal set implied by theorem_bound and V0 <= alpha2 |phi0|^2.
double distance_bound(const CertificateReport& r, double phi0_norm, double w0_norm, double t, int j);

/// sqrt(aw2 / aw1) * exp(-gamma_bar * beta_tilde * (t + j) / (2 aw2)) * |w0|.
double estimator_bound(const CertificateReport& r, double w0_norm, double t, int j);

CertificateReport certify_all(const model::NetworkParams& p, const Certificate& c,
                              Exec exec = Exec::parallel);

}  // namespace hyntp::certify
