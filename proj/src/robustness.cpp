// Copyright 2026 hyntp-lab contributors
// SPDX-License-Identifier: Apache-2.0

#include "hyntp/robustness.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <memory>
#include <random>

#include "hyntp/error.hpp"

namespace hyntp::robustness {

namespace {

std::uint32_t kind_tag(NoiseKind k) {
  switch (k) {
    case NoiseKind::comm:
      return 0x636f6d6du;
    case NoiseKind::drift_output:
      return 0x64726674u;
    case NoiseKind::sigma_ref:
      return 0x7369676du;
  }
  return 0;
}

// Noise for index j, recomputed only when j changes. Owned by one System.
struct NoiseCache {
  int j = -1;
  Vector bar;  // T^{-1} times the agent-level sample
};

const Vector& cached_bar(NoiseCache& cache, const NoiseConfig& noise, const Matrix& t_inv, int j) {
  if (cache.j != j) {
    cache.bar = t_inv * sample_noise(noise, j, t_inv.rows());
    cache.j = j;
  }
  return cache.bar;
}

void add_product(const Matrix& b, std::span<const double> q, std::span<double> y) {
  for (std::size_t i = 0; i < b.rows(); ++i) {
    double s = 0.0;
    for (std::size_t k = 0; k < b.cols(); ++k) s += b(i, k) * q[k];
    y[i] += s;
  }
}

}  // namespace

void NoiseConfig::validate() const {
  if (!(amplitude >= 0.0) || !std::isfinite(amplitude)) {
    throw ContractError("noise: amplitude must be finite and non-negative");
  }
  if (const auto* u = std::get_if<UniformNoise>(&distribution)) {
    if (!(u->lo <= u->hi)) throw ContractError("noise: uniform bounds need lo <= hi");
  }
}

Vector sample_noise(const NoiseConfig& noise, int j, std::size_t n) {
  Vector out(n);
  if (const auto* c = std::get_if<ConstantNoise>(&noise.distribution)) {
    for (double& v : out) v = noise.amplitude * c->value;
    return out;
  }
  const auto& u = std::get<UniformNoise>(noise.distribution);
  std::seed_seq seq{static_cast<std::uint32_t>(noise.seed), static_cast<std::uint32_t>(noise.seed >> 32),
                    static_cast<std::uint32_t>(j), kind_tag(noise.kind)};
  std::mt19937_64 gen(seq);
  for (double& v : out) {
    const double draw = static_cast<double>(gen() >> 11) * 0x1.0p-53;
    v = noise.amplitude * (u.lo + draw * (u.hi - u.lo));
  }
  return out;
}

PerturbationMatrices build_perturbation_matrices(const model::SystemMatrices& m) {
  const std::size_t k = m.m;
  PerturbationMatrices pm{Matrix(2 * k, k), {{m.mu, 0.0}, {0.0, 1.0}}, Matrix(2 * k, 2 * k)};
  pm.B_g.set_block(k, 0, m.Lbar * m.gamma);
  pm.B_m2.set_block(0, 0, Matrix::identity(k) * m.mu);
  pm.B_m2.set_block(k, k, Matrix::identity(k));
  return pm;
}

model::TransformedState perturbed_jump_comm(const model::TransformedState& chi,
                                            const model::SystemMatrices& m,
                                            const PerturbationMatrices& pm,
                                            std::span<const double> m_bar, double reset) {
  if (m_bar.size() != m.n) throw DimensionError("perturbed_jump_comm: noise length must equal n");
  model::TransformedState out = model::transformed_jump(chi, m, reset);
  const Vector bm = pm.B_g * m_bar.subspan(1);
  for (std::size_t i = 0; i < out.z2.size(); ++i) out.z2[i] -= bm[i];
  return out;
}

Vector drift_noise_input(std::span<const double> m_bar) {
  const std::size_t n = m_bar.size();
  Vector q(2 * n);
  q[0] = -m_bar[0];
  q[1] = m_bar[0];
  for (std::size_t i = 1; i < n; ++i) {
    q[2 + (i - 1)] = -m_bar[i];
    q[2 + (n - 1) + (i - 1)] = m_bar[i];
  }
  return q;
}

model::EstimatorState perturbed_estimator_flow(const model::EstimatorState& w,
                                               const model::SystemMatrices& m,
                                               const PerturbationMatrices& pm,
                                               std::span<const double> q_bar) {
  if (q_bar.size() != 2 * m.n) throw DimensionError("perturbed_estimator_flow: input length");
  model::EstimatorState d = model::estimator_flow(w, m);
  add_product(pm.B_m1, q_bar.subspan(0, 2), d.w1);
  add_product(pm.B_m2, q_bar.subspan(2), d.w2);
  return d;
}

model::TransformedState perturbed_sigma_flow(const model::TransformedState& chi,
                                             const model::SystemMatrices& m,
                                             std::span<const double> m_sigma_bar) {
  if (m_sigma_bar.size() != m.n) throw DimensionError("perturbed_sigma_flow: noise length");
  model::TransformedState d = model::transformed_flow(chi, m);
  d.z1[0] += m_sigma_bar[0];
  for (std::size_t i = 0; i < m.m; ++i) d.z2[i] += m_sigma_bar[i + 1];
  return d;
}

model::System perturbed_system(const model::SystemMatrices& m, const graph::DisagreementTransform& tr,
                               const NoiseConfig& noise) {
  noise.validate();
  const model::System nominal = model::transformed_system(m);
  const PerturbationMatrices pm = build_perturbation_matrices(m);
  const std::size_t k = m.m;
  auto cache = std::make_shared<NoiseCache>();
  const Matrix t_inv = tr.T_inv;

  switch (noise.kind) {
    case NoiseKind::comm:
      return {nominal.flow,
              [nominal, pm, noise, t_inv, k](std::span<const double> x, int j, double reset) {
                Vector out = nominal.jump(x, j, reset);
                const Vector bar = t_inv * sample_noise(noise, j, t_inv.rows());
                const Vector bm = pm.B_g * std::span<const double>(bar).subspan(1);
                for (std::size_t i = 0; i < 2 * k; ++i) out[2 + i] -= bm[i];
                return out;
              }};
    case NoiseKind::drift_output:
      return {[nominal, pm, noise, t_inv, k, cache](std::span<const double> x, int j,
                                                     std::span<double> dx) {
                nominal.flow(x, j, dx);
                const Vector q = drift_noise_input(cached_bar(*cache, noise, t_inv, j));
                add_product(pm.B_m1, std::span<const double>(q).subspan(0, 2),
                            dx.subspan(2 + 2 * k, 2));
                add_product(pm.B_m2, std::span<const double>(q).subspan(2),
                            dx.subspan(4 + 2 * k, 2 * k));
              },
              nominal.jump};
    case NoiseKind::sigma_ref:
      return {[nominal, noise, t_inv, k, cache](std::span<const double> x, int j,
                                                 std::span<double> dx) {
                nominal.flow(x, j, dx);
                const Vector& bar = cached_bar(*cache, noise, t_inv, j);
                dx[0] += bar[0];
                for (std::size_t i = 0; i < k; ++i) dx[2 + i] += bar[i + 1];
              },
              nominal.jump};
  }
  return nominal;
}

IssResult iss_experiment(const model::NetworkParams& p, const certify::Certificate& c,
                         const NoiseConfig& noise, const model::ReducedState& initial,
                         hybrid::Horizon horizon, int trials, double step, certify::Exec exec) {
  if (trials < 1) throw PreconditionError("iss_experiment: need at least one trial");
  const certify::CertificateReport report = certify_all(p, c, exec);
  if (!report.ok) throw PreconditionError("iss_experiment: certificate does not verify");
  const auto tr = graph::disagreement_transform(p.graph);
  const auto m = model::build_system_matrices(p, tr);
  const Vector chi0 = model::transform_forward(initial, tr).pack();
  const std::size_t n = p.n;

  IssResult result;
  result.trials.resize(static_cast<std::size_t>(trials));
  auto run_trial = [&](std::size_t k) {
    NoiseConfig nk = noise;
    nk.seed = noise.seed + k;
    hybrid::TimerConfig timer = p.timer;
    if (auto* s = std::get_if<hybrid::SeededSchedule>(&timer.schedule)) s->seed += k;
    const model::System sys = perturbed_system(m, tr, nk);
    const hybrid::HybridSolution sol = hybrid::simulate(sys.flow, sys.jump, chi0, timer, horizon, step);

    IssTrial& out = result.trials[k];
    out.noise_seed = nk.seed;
    out.t.reserve(sol.samples.size());
    out.disagreement.reserve(sol.samples.size());
    Vector ebar(n);
    const double window = horizon.T * 0.75;
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& s : sol.samples) {
      ebar[0] = s.x[0];
      for (std::size_t i = 1; i < n; ++i) ebar[i] = s.x[2 + (i - 1)];
      const double d = model::disagreement(tr.T * ebar);
      out.t.push_back(s.t);
      out.disagreement.push_back(d);
      if (s.t >= window) {
        sum += d;
        ++count;
        out.max_error = std::max(out.max_error, d);
      }
    }
    out.steady_state_error = count > 0 ? sum / static_cast<double>(count) : 0.0;
  };

  const auto total = static_cast<long>(trials);
  if (exec == certify::Exec::serial) {
    for (long k = 0; k < total; ++k) run_trial(static_cast<std::size_t>(k));
  } else {
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
    for (long k = 0; k < total; ++k) {
      try {
        run_trial(static_cast<std::size_t>(k));
      } catch (...) {
#pragma omp critical(hyntp_iss_failure)
        if (!failure) failure = std::current_exception();
      }
    }
    if (failure) std::rethrow_exception(failure);
  }

  for (const IssTrial& t : result.trials) {
    result.steady_state_error += t.steady_state_error;
    result.max_error = std::max(result.max_error, t.max_error);
  }
  result.steady_state_error /= static_cast<double>(trials);
  return result;
}

}  // namespace hyntp::robustness
