// Copyright 2026 hyntp-lab contributors
// SPDX-License-Identifier: Apache-2.0

#include "hyntp/certify.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <string>

#include "hyntp/error.hpp"
#include "hyntp/graph.hpp"
#include "hyntp/numerics.hpp"

namespace hyntp::certify {

namespace {

using numerics::mat_exp;
using numerics::sym_eig_extrema;
using numerics::sym_part;

void require_shape(const Matrix& a, std::size_t r, std::size_t c, const char* what) {
  if (a.rows() != r || a.cols() != c) {
    throw DimensionError(std::string(what) + ": expected " + std::to_string(r) + "x" +
                         std::to_string(c) + ", got " + std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()));
  }
}

// Runs body(k) for k in [0, count), serially or with OpenMP; rethrows the
// first exception raised by any iteration.
template <typename Body>
void for_each_point(std::size_t count, Exec exec, Body body) {
  if (exec == Exec::serial) {
    for (std::size_t k = 0; k < count; ++k) body(k);
    return;
  }
  std::exception_ptr failure;
  const auto total = static_cast<long>(count);
#pragma omp parallel for schedule(static)
  for (long k = 0; k < total; ++k) {
    try {
      body(static_cast<std::size_t>(k));
    } catch (...) {
#pragma omp critical(hyntp_grid_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

Matrix weighted(const Matrix& a, const Matrix& p, double nu) {
  const Matrix e = mat_exp(a * nu);
  return sym_part(e.transpose() * p * e);
}

double quad(const Matrix& p, std::span<const double> x) {
  const Vector px = p * x;
  return vec::dot(x, px);
}

}  // namespace

void Certificate::validate(std::size_t n) const {
  const std::size_t m2 = 2 * (n - 1);
  require_shape(P1, m2, m2, "certificate P1");
  require_shape(P2, 2, 2, "certificate P2");
  require_shape(P3, m2, m2, "certificate P3");
  const std::pair<const Matrix*, const char*> named[] = {{&P1, "P1"}, {&P2, "P2"}, {&P3, "P3"}};
  for (const auto& [mat, name] : named) {
    numerics::require_symmetric(*mat, name);
    if (!numerics::is_positive_definite(*mat)) {
      throw ContractError(std::string("certificate ") + name + " is not positive definite");
    }
  }
  if (!(epsilon_young > 0.0)) throw ContractError("certificate: epsilon must be positive");
  if (!(gamma_split > 0.0 && gamma_split < 1.0)) {
    throw ContractError("certificate: gamma_split must lie in (0, 1)");
  }
  if (nu_grid_points < 101) throw ContractError("certificate: nu grid needs at least 101 points");
}

Vector uniform_grid(double lo, double hi, std::size_t points) {
  if (points < 2) throw ContractError("uniform_grid: need at least 2 points");
  Vector g(points);
  for (std::size_t k = 0; k < points; ++k) {
    g[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(points - 1);
  }
  g.back() = hi;
  return g;
}

GridExtrema weighted_grid(const Matrix& a, const Matrix& p, std::span<const double> nus, Exec exec) {
  GridExtrema out{Vector(nus.size()), Vector(nus.size())};
  for_each_point(nus.size(), exec, [&](std::size_t k) {
    const auto ex = sym_eig_extrema(weighted(a, p, nus[k]));
    out.lambda_min[k] = ex.lambda_min;
    out.lambda_max[k] = ex.lambda_max;
  });
  return out;
}

GridExtrema jump_grid(const Matrix& a, const Matrix& g, const Matrix& p,
                      std::span<const double> nus, Exec exec) {
  GridExtrema out{Vector(nus.size()), Vector(nus.size())};
  const Matrix gt = g.transpose();
  for_each_point(nus.size(), exec, [&](std::size_t k) {
    const Matrix s = sym_part(gt * weighted(a, p, nus[k]) * g - p);
    const auto ex = sym_eig_extrema(s);
    out.lambda_min[k] = ex.lambda_min;
    out.lambda_max[k] = ex.lambda_max;
  });
  return out;
}

FlowLmiResult check_flow_lmis(const model::SystemMatrices& m, const Certificate& c) {
  require_shape(c.P2, 2, 2, "check_flow_lmis P2");
  require_shape(c.P3, 2 * m.m, 2 * m.m, "check_flow_lmis P3");
  const Matrix s2 = sym_part(c.P2 * m.A_f3 + m.A_f3.transpose() * c.P2);
  const Matrix s3 = sym_part(c.P3 * m.A_f4 + m.A_f4.transpose() * c.P3);
  const double beta1 = -sym_eig_extrema(s2).lambda_max;
  const double beta2 = -sym_eig_extrema(s3).lambda_max;
  const bool ok = numerics::is_positive_definite(-s2) && numerics::is_positive_definite(-s3);
  return {ok, beta1, beta2};
}

JumpContractionResult check_jump_contraction(const model::SystemMatrices& m, const Certificate& c,
                                             double T1, double T2, Exec exec) {
  if (!(T1 <= T2)) throw PreconditionError("check_jump_contraction: T1 must not exceed T2");
  require_shape(c.P1, 2 * m.m, 2 * m.m, "check_jump_contraction P1");
  const Vector nus = uniform_grid(T1, T2, c.nu_grid_points);
  const GridExtrema grid = jump_grid(m.A_f2, m.A_g2, c.P1, nus, exec);

  std::size_t worst = 0;
  double min_lambda_min = grid.lambda_min[0];
  for (std::size_t k = 0; k < nus.size(); ++k) {
    if (grid.lambda_max[k] > grid.lambda_max[worst]) worst = k;
    min_lambda_min = std::min(min_lambda_min, grid.lambda_min[k]);
  }
  const double max_lambda_max = grid.lambda_max[worst];
  JumpContractionResult r;
  r.ok = max_lambda_max < 0.0;
  // Largest constant with S(nu) <= -kappa2 I on the whole grid, with a 1% margin.
  r.kappa2 = 0.99 * (-max_lambda_max);
  r.worst_nu = nus[worst];
  r.max_lambda_max = max_lambda_max;
  r.kappa2_lambda_min_sup = 0.99 * (-min_lambda_min);
  return r;
}

CertificateReport compute_constants(const model::SystemMatrices& m, const Certificate& c, double T1,
                                    double T2, const FlowLmiResult& flow,
                                    const JumpContractionResult& jump, Exec exec) {
  CertificateReport r;
  r.flow_lmis_ok = flow.ok;
  r.jump_contraction_ok = jump.ok;
  r.beta1 = flow.beta1;
  r.beta2 = flow.beta2;
  r.kappa2 = jump.kappa2;
  r.worst_nu = jump.worst_nu;
  r.max_jump_eigenvalue = jump.max_lambda_max;
  r.kappa2_lambda_min_sup = jump.kappa2_lambda_min_sup;
  r.T1 = T1;
  r.T2 = T2;
  r.epsilon_young = c.epsilon_young;

  const Vector nus = uniform_grid(0.0, T2, c.nu_grid_points);
  const GridExtrema w = weighted_grid(m.A_f2, c.P1, nus, exec);
  double norm_max = 0.0;
  double wmin = w.lambda_min[0], wmax = w.lambda_max[0];
  double emin = std::exp(2.0 * m.h * nus[0]), emax = emin;
  for (std::size_t k = 0; k < nus.size(); ++k) {
    norm_max = std::max({norm_max, std::abs(w.lambda_min[k]), std::abs(w.lambda_max[k])});
    wmin = std::min(wmin, w.lambda_min[k]);
    wmax = std::max(wmax, w.lambda_max[k]);
    const double ex = std::exp(2.0 * m.h * nus[k]);
    emin = std::min(emin, ex);
    emax = std::max(emax, ex);
  }
  const auto p2 = sym_eig_extrema(c.P2);
  const auto p3 = sym_eig_extrema(c.P3);

  r.kappa1 = 2.0 * norm_max;
  const double eps = c.epsilon_young;
  r.kappa_bar1 = std::max(r.kappa1 / (2.0 * eps), r.kappa1 * eps / 2.0 - r.beta2);
  r.kappa_bar2 = std::min(1.0, r.kappa2);
  r.alpha2 = std::max({emax, wmax, p2.lambda_max, p3.lambda_max});
  r.alpha1 = std::min({emin, wmin, p2.lambda_min, p3.lambda_min});
  r.alpha_w1 = std::min(p2.lambda_min, p3.lambda_min);
  r.alpha_w2 = std::max(p2.lambda_max, p3.lambda_max);
  r.beta_tilde = std::min(r.beta1, r.beta2);
  r.gamma_bar = std::min(1.0 - c.gamma_split, c.gamma_split * T1);

  const GrowthResult g = check_growth_condition(r);
  r.growth_factor = g.growth_factor;
  r.growth_ok = g.ok;
  r.ok = r.flow_lmis_ok && r.jump_contraction_ok && r.growth_ok;
  return r;
}

GrowthResult check_growth_condition(const CertificateReport& r) {
  const double factor =
      std::abs(std::exp(r.kappa_bar1 * r.T2 / r.alpha2) * (1.0 - r.kappa_bar2 / r.alpha2));
  return {factor < 1.0, factor};
}

double lyapunov_value(const model::TransformedState& chi, const model::SystemMatrices& m,
                      const Certificate& c) {
  if (chi.z2.size() != 2 * m.m || chi.w2.size() != 2 * m.m) {
    throw DimensionError("lyapunov_value: state size does not match system matrices");
  }
  const double v1 = std::exp(2.0 * m.h * chi.tau) * chi.z1[1] * chi.z1[1];
  const double v2 = quad(weighted(m.A_f2, c.P1, chi.tau), chi.z2);
  const double vr = quad(c.P2, chi.w1) + quad(c.P3, chi.w2);
  return v1 + v2 + vr;
}

double estimator_bound(const CertificateReport& r, double w0_norm, double t, int j) {
  if (j < 0) throw ContractError("estimator_bound: negative jump index");
  return std::sqrt(r.alpha_w2 / r.alpha_w1) *
         std::exp(-r.gamma_bar * r.beta_tilde * (t + j) / (2.0 * r.alpha_w2)) * w0_norm;
}

double theorem_bound(const CertificateReport& r, double V0, double w0_norm, double t, int j) {
  if (j < 0) throw ContractError("theorem_bound: negative jump index");
  if (!r.growth_ok) throw PreconditionError("theorem_bound: growth condition does not hold");
  const double flow_factor = std::exp(r.kappa_bar1 * r.T2 / r.alpha2);
  const double geometric = std::pow(r.growth_factor, j);
  const double w = estimator_bound(r, w0_norm, t, j);
  return std::sqrt(flow_factor * (geometric * V0 + r.kappa_bar2 * w * w));
}

double distance_bound(const CertificateReport& r, double phi0_norm, double w0_norm, double t, int j) {
  return theorem_bound(r, r.alpha2 * phi0_norm * phi0_norm, w0_norm, t, j) / std::sqrt(r.alpha1);
}

CertificateReport certify_all(const model::NetworkParams& p, const Certificate& c, Exec exec) {
  p.validate();
  const auto tr = graph::disagreement_transform(p.graph);
  c.validate(p.n);
  const auto m = model::build_system_matrices(p, tr);
  const FlowLmiResult flow = check_flow_lmis(m, c);
  const JumpContractionResult jump = check_jump_contraction(m, c, p.timer.T1, p.timer.T2, exec);
  CertificateReport r = compute_constants(m, c, p.timer.T1, p.timer.T2, flow, jump, exec);
  r.spectrum_real = tr.spectrum_real;
  return r;
}

}  // namespace hyntp::certify
