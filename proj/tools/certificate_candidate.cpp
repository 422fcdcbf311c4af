// Copyright 2026 hyntp-lab contributors
// SPDX-License-Identifier: Apache-2.0

// certificate-candidate <scenario.json> [--epsilon e] [--target-kappa1 k] [--grid n]
//
// Builds Lyapunov matrices for a scenario and prints them as a "certificate" JSON
// object on stdout; the verification summary goes to stderr.
//  - P1 couples each Laplacian mode's clock error with its memory state through a
//    2x2 weight chosen by grid search to maximize the jump decrease relative to
//    the weight size, phi(nu) = (e^{h nu} - 1) / h. It is then scaled so that
//    kappa1 hits the target, or so that kappa2 = 1 without a target.
//  - P2 and P3 solve the flow Lyapunov equations with right-hand side q I.
//  - q is the smallest value with beta2 >= kappa1 epsilon / 2 - kappa1 / (2 epsilon);
//    epsilon is scanned for the smallest growth factor unless given.

#include <algorithm>
#include <cmath>
#include <limits>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "hyntp/certify.hpp"
#include "hyntp/cli/output.hpp"
#include "hyntp/cli/scenario.hpp"
#include "hyntp/error.hpp"
#include "hyntp/numerics.hpp"

namespace {

using hyntp::Matrix;
using hyntp::Vector;

double phi(double h, double nu) { return h == 0.0 ? nu : std::expm1(h * nu) / h; }

// Per-mode weight [[1, c], [c, r]] on (clock error, memory) for a Laplacian mode
// alpha +- i beta. After a jump and a flow of length nu the clock error scales by
// v1 = 1 - gamma phi(nu) lambda and the memory becomes v2 = -gamma e^{h nu} lambda
// times the clock error, so the decrease matrix of the mode is
// [[g(nu) - 1, -c], [-c, -r]] with g = |v1|^2 + 2 c Re(conj(v1) v2) + r |v2|^2.
struct ModeWeight {
  double c = 0.0;
  double r = 1.0;
  double ratio = -1.0;  // min over nu of -lambda_max(decrease) / lambda_max(weight)
};

double lambda_max_2x2(double a, double b, double d) {
  return 0.5 * (a + d) + std::sqrt(0.25 * (a - d) * (a - d) + b * b);
}

double mode_ratio(double h, double gamma, double alpha, double beta, const Vector& nus, double c, double r) {
  if (c * c >= r) return -1.0;
  double worst = std::numeric_limits<double>::infinity();
  for (double nu : nus) {
    const double f = gamma * phi(h, nu);
    const double v1r = 1.0 - f * alpha, v1i = -f * beta;
    const double k = -gamma * std::exp(h * nu);
    const double v2r = k * alpha, v2i = k * beta;
    const double g = v1r * v1r + v1i * v1i + 2.0 * c * (v1r * v2r + v1i * v2i) + r * (v2r * v2r + v2i * v2i);
    worst = std::min(worst, -lambda_max_2x2(g - 1.0, -c, -r));
  }
  return worst / lambda_max_2x2(1.0, c, r);
}

ModeWeight best_mode_weight(double h, double gamma, double alpha, double beta, const Vector& nus) {
  Vector coarse;
  const std::size_t stride = std::max<std::size_t>(1, nus.size() / 200);
  for (std::size_t k = 0; k < nus.size(); k += stride) coarse.push_back(nus[k]);
  coarse.push_back(nus.back());
  ModeWeight best;
  for (int i = 0; i <= 120; ++i) {
    const double r = std::pow(10.0, -3.0 + 6.0 * i / 120.0);
    const double root = std::sqrt(r);
    for (int k = -60; k <= 60; ++k) {
      const double c = 0.99 * root * k / 60.0;
      const double ratio = mode_ratio(h, gamma, alpha, beta, coarse, c, r);
      if (ratio > best.ratio) best = {c, r, ratio};
    }
  }
  best.ratio = mode_ratio(h, gamma, alpha, beta, nus, best.c, best.r);
  if (!(best.ratio > 0.0)) throw hyntp::PreconditionError("no contracting weight found for a Laplacian mode");
  return best;
}

// Each mode block is scaled so that all modes share the same decrease margin.
Matrix base_p1(const hyntp::model::SystemMatrices& m, double T1, double T2, std::size_t grid) {
  const Vector nus = hyntp::certify::uniform_grid(T1, T2, grid);
  const std::size_t k = m.m;
  Matrix p1(2 * k, 2 * k);
  for (std::size_t i = 0; i < k; ++i) {
    const bool paired = i + 1 < k && m.Lbar(i, i + 1) != 0.0;
    const double alpha = m.Lbar(i, i);
    const double beta = paired ? m.Lbar(i, i + 1) : 0.0;
    const ModeWeight w = best_mode_weight(m.h, m.gamma, alpha, beta, nus);
    const double scale = 1.0 / (w.ratio * lambda_max_2x2(1.0, w.c, w.r));
    const std::size_t width = paired ? 2 : 1;
    for (std::size_t d = 0; d < width; ++d) {
      p1(i + d, i + d) = scale;
      p1(k + i + d, k + i + d) = scale * w.r;
      p1(i + d, k + i + d) = scale * w.c;
      p1(k + i + d, i + d) = scale * w.c;
    }
    i += width - 1;
  }
  return p1;
}

nlohmann::ordered_json matrix_json(const Matrix& a) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    nlohmann::ordered_json row = nlohmann::ordered_json::array();
    for (std::size_t k = 0; k < a.cols(); ++k) row.push_back(a(i, k));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Build and verify a Lyapunov certificate candidate for a scenario"};
  std::string path;
  std::optional<double> epsilon;
  std::optional<double> target_kappa1;
  std::size_t grid = 2001;
  app.add_option("scenario", path, "scenario JSON file")->required()->check(CLI::ExistingFile);
  app.add_option("--epsilon", epsilon, "fix the Young splitting constant")->check(CLI::PositiveNumber);
  app.add_option("--target-kappa1", target_kappa1, "scale P1 to reach this kappa1")->check(CLI::PositiveNumber);
  app.add_option("--grid", grid, "nu grid points")->check(CLI::Range(101, 1000001));
  CLI11_PARSE(app, argc, argv);

  try {
    namespace cert = hyntp::certify;
    const hyntp::cli::Scenario s = hyntp::cli::load_scenario(path);
    const auto& p = s.params;
    const auto tr = hyntp::graph::disagreement_transform(p.graph);
    const auto m = hyntp::model::build_system_matrices(p, tr);
    const double T1 = p.timer.T1, T2 = p.timer.T2;

    cert::Certificate c;
    c.nu_grid_points = grid;
    c.P1 = base_p1(m, T1, T2, grid);
    c.P2 = Matrix::identity(2);
    c.P3 = Matrix::identity(2 * m.m);
    const auto jump = cert::check_jump_contraction(m, c, T1, T2);
    const auto unit = cert::compute_constants(m, c, T1, T2, {true, 1.0, 1.0}, jump);
    if (!jump.ok) throw hyntp::PreconditionError("candidate P1 fails the jump contraction");

    const double scale = target_kappa1 ? *target_kappa1 / unit.kappa1 : 1.0 / jump.kappa2;
    c.P1 = c.P1 * scale;
    const double kappa1 = unit.kappa1 * scale;
    const double kappa_bar2 = std::min(1.0, jump.kappa2 * scale);
    const Matrix x2 = hyntp::numerics::sym_part(hyntp::numerics::solve_lyapunov(m.A_f3, Matrix::identity(2)));
    const Matrix x3 = hyntp::numerics::sym_part(hyntp::numerics::solve_lyapunov(m.A_f4, Matrix::identity(2 * m.m)));
    const double x_max = std::max(hyntp::numerics::sym_eig_extrema(x2).lambda_max,
                                  hyntp::numerics::sym_eig_extrema(x3).lambda_max);
    const double p1_max = std::max(1.0, unit.alpha2 * scale);
    auto q_for = [&](double eps) { return std::max(1.0, kappa1 * eps / 2.0 - kappa1 / (2.0 * eps)); };
    auto growth_for = [&](double eps) {
      const double kappa_bar1 = std::max(kappa1 / (2.0 * eps), kappa1 * eps / 2.0 - q_for(eps));
      const double alpha2 = std::max(p1_max, q_for(eps) * x_max);
      return std::exp(kappa_bar1 * T2 / alpha2) * (1.0 - kappa_bar2 / alpha2);
    };
    if (epsilon) {
      c.epsilon_young = *epsilon;
    } else {
      // Log-spaced scan of the splitting constant for the smallest growth factor.
      c.epsilon_young = kappa1 * T2 / kappa_bar2;
      for (int k = 0; k <= 2000; ++k) {
        const double eps = std::pow(10.0, -4.0 + 8.0 * k / 2000.0);
        if (growth_for(eps) < growth_for(c.epsilon_young)) c.epsilon_young = eps;
      }
    }
    const double q = q_for(c.epsilon_young);
    c.P2 = x2 * q;
    c.P3 = x3 * q;

    const cert::CertificateReport r = cert::certify_all(p, c);
    std::cerr << "kappa1=" << r.kappa1 << " kappa_bar1=" << r.kappa_bar1 << " kappa2=" << r.kappa2
              << " alpha2=" << r.alpha2 << " growth=" << r.growth_factor << " ok=" << (r.ok ? "yes" : "no")
              << '\n';

    nlohmann::ordered_json out;
    out["P1"] = matrix_json(c.P1);
    out["P2"] = matrix_json(c.P2);
    out["P3"] = matrix_json(c.P3);
    out["epsilon"] = c.epsilon_young;
    out["nu_grid_points"] = c.nu_grid_points;
    std::cout << out.dump(2) << '\n';
    return r.ok ? 0 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
