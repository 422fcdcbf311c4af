// Copyright 2026 hyntp-lab contributors
// SPDX-License-Identifier: Apache-2.0

// Acceptance runner: one PASS/FAIL line per criterion.
// --expect-fail a,b,... makes the exit status 0 only when exactly those criteria fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fixtures.hpp"
#include "hyntp/certify.hpp"
#include "hyntp/cli/commands.hpp"
#include "hyntp/cli/scenario.hpp"
#include "hyntp/graph.hpp"
#include "hyntp/hybrid.hpp"
#include "hyntp/model.hpp"
#include "hyntp/numerics.hpp"
#include "hyntp/robustness.hpp"

namespace {

using namespace hyntp;

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string title;
  double time_limit;  // seconds; 0 means none
  std::function<Outcome()> body;
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

double rel_err(double value, double target) { return std::abs(value - target) / std::abs(target); }

cli::Scenario scenario(const std::string& file) { return cli::load_scenario(testing::scenario_path(file)); }

double norm(std::span<const double> v) { return std::sqrt(vec::dot(v, v)); }

// 1. Printed five-agent matrices.
Outcome printed_five_agent_constants() {
  const cli::Scenario s = scenario("five_agent_printed_p.json");
  certify::Certificate c = *s.certificate;
  c.nu_grid_points = 2001;
  const certify::CertificateReport r = certify::certify_all(s.params, c);
  const double e_k1 = rel_err(r.kappa1, 31.44);
  const double e_kb1 = rel_err(r.kappa_bar1, 9.78);
  const double e_a2 = rel_err(r.alpha2, 18.923);
  const double e_kb2 = rel_err(r.kappa_bar2, 1.0);
  const bool constants = std::max({e_k1, e_kb1, e_a2, e_kb2}) < 0.02;
  std::ostringstream d;
  d << "flow " << r.flow_lmis_ok << " jump " << r.jump_contraction_ok << " growth " << r.growth_ok << " ("
    << fmt(r.growth_factor) << "); kappa1 " << fmt(r.kappa1) << " kappa_bar1 " << fmt(r.kappa_bar1) << " alpha2 "
    << fmt(r.alpha2) << " kappa_bar2 " << fmt(r.kappa_bar2);
  return {r.ok && constants, d.str()};
}

// 2. Four-agent aperiodic loop; printed constants need the unpublished matrices,
// so the verdict is on the conditions with the bundled admissible certificate.
Outcome four_agent_conditions() {
  const cli::Scenario s = scenario("four_agent_aperiodic.json");
  const certify::CertificateReport r = certify::certify_all(s.params, *s.certificate);
  std::ostringstream d;
  d << "flow " << r.flow_lmis_ok << " jump " << r.jump_contraction_ok << " growth " << fmt(r.growth_factor)
    << "; kappa1 " << fmt(r.kappa1) << " (printed 19.22), kappa_bar1 " << fmt(r.kappa_bar1)
    << " (printed 2.02), alpha2 " << fmt(r.alpha2) << " (printed 44.03); printed constants not reproduced";
  return {r.ok && r.growth_factor < 1.0, d.str()};
}

// 3. Synchronization time of the five-agent loop.
Outcome five_agent_synchronization() {
  const cli::Scenario s = scenario("five_agent.json");
  const hybrid::HybridSolution sol = cli::simulate_scenario(s);
  const std::size_t n = s.params.n;
  double settled = 0.0;  // last time either error was at or above the threshold
  std::vector<double> window_t, window_log;
  double window_max = 0.0;
  double window_end = 1.0;
  for (const hybrid::Sample& x : sol.samples) {
    const auto st = model::ClosedLoopState::unpack(x.x, n);
    const double dis = model::disagreement(st.e);
    double drift = 0.0;
    for (std::size_t i = 0; i < n; ++i) drift = std::max(drift, std::abs(st.a_hat[i] - s.params.a[i]));
    if (dis >= 1e-3 || drift >= 1e-3) settled = x.t;
    if (x.t > window_end) {
      window_t.push_back(window_end);
      window_log.push_back(std::log(window_max));
      window_max = 0.0;
      window_end += 1.0;
    }
    window_max = std::max(window_max, dis);
  }
  // Least-squares slope of the log of per-second maxima.
  const double nw = static_cast<double>(window_t.size());
  double mt = 0.0, ml = 0.0;
  for (std::size_t k = 0; k < window_t.size(); ++k) {
    mt += window_t[k] / nw;
    ml += window_log[k] / nw;
  }
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < window_t.size(); ++k) {
    num += (window_t[k] - mt) * (window_log[k] - ml);
    den += (window_t[k] - mt) * (window_t[k] - mt);
  }
  const double slope = num / den;
  std::ostringstream d;
  d << "errors below 1e-3 from t = " << fmt(settled) << " s (limit 15 s); envelope slope " << fmt(slope)
    << " /s; final disagreement " << fmt(model::disagreement(model::ClosedLoopState::unpack(sol.back().x, n).e));
  return {settled <= 15.0 && slope < 0.0, d.str()};
}

// 4. V against the bound envelope along transformed trajectories. The verdict is on
// the five-agent loop; the other scenarios are logged.
Outcome lyapunov_domination() {
  bool pass = false;
  std::ostringstream d;
  for (const char* file : {"five_agent.json", "four_agent_aperiodic.json", "four_agent_periodic.json",
                           "four_agent_directed_cycle.json"}) {
    const cli::Scenario s = scenario(file);
    const auto tr = graph::disagreement_transform(s.params.graph);
    const auto m = model::build_system_matrices(s.params, tr);
    const certify::CertificateReport r = certify::certify_all(s.params, *s.certificate);
    const model::TransformedState chi0 = model::transform_forward(model::reduce_state(s.initial, s.params), tr);
    const model::System sys = model::transformed_system(m);
    const auto sol = hybrid::simulate(sys.flow, sys.jump, chi0.pack(), s.params.timer, s.horizon, s.step);
    const double v0 = certify::lyapunov_value(chi0, m, *s.certificate);
    const double w0 = std::sqrt(vec::dot(chi0.w1, chi0.w1) + vec::dot(chi0.w2, chi0.w2));
    double worst = 0.0;
    for (const hybrid::Sample& x : sol.samples) {
      const double v = certify::lyapunov_value(model::TransformedState::unpack(x.x, s.params.n), m, *s.certificate);
      const double b = certify::theorem_bound(r, v0, w0, x.t, x.j) * (1.0 + 1e-6);
      worst = std::max(worst, v / (b * b));
    }
    if (s.name == "five_agent") {
      pass = r.ok && worst <= 1.0;
      d << s.name << " max V/bound^2 " << fmt(worst) << "; logged:";
    } else {
      d << " " << s.name << " " << fmt(worst);
    }
  }
  return {pass, d.str()};
}

// 5. Reduction and transform equivalence over 10 s.
Outcome reduction_equivalence() {
  bool pass = true;
  bool first = true;
  std::ostringstream d;
  for (const char* file : {"five_agent.json", "four_agent_aperiodic.json", "four_agent_directed_cycle.json"}) {
    const cli::Scenario s = scenario(file);
    const hybrid::Horizon h{10.0, static_cast<int>(std::ceil(10.0 / s.params.timer.T1)) + 2};
    const cli::ReductionReport r = cli::compare_reduction(s, h);
    pass = pass && r.full_vs_reduced < 1e-6 && r.reduced_vs_transformed < 1e-6 && r.samples_full > 0;
    d << (first ? "" : "; ") << s.name << " " << fmt(r.full_vs_reduced) << "/" << fmt(r.reduced_vs_transformed);
    first = false;
  }
  return {pass, d.str()};
}

// 6. Distance identities under the state maps.
Outcome distance_algebra() {
  const model::NetworkParams p = testing::five_agent_params();
  const auto tr = graph::disagreement_transform(p.graph);
  const Matrix gm = graph::gamma_matrix(tr);
  const double g_norm = numerics::spectral_norm(gm);
  const double g_inv_norm = numerics::spectral_norm(numerics::inverse(gm));
  std::mt19937_64 gen(2026);
  double worst_identity = 0.0;
  bool sandwich = true;
  for (int trial = 0; trial < 100; ++trial) {
    model::ClosedLoopState x;
    x.e = testing::random_vector(gen, p.n, -3.0, 3.0);
    x.eta = testing::random_vector(gen, p.n);
    x.tau_star = testing::random_vector(gen, p.n, 0.0, 10.0);
    x.a_hat = testing::random_vector(gen, p.n, 0.5, 1.5);
    x.tau_hat = testing::random_vector(gen, p.n, 0.0, 10.0);
    x.u.resize(p.n);
    for (std::size_t i = 0; i < p.n; ++i) x.u[i] = x.eta[i] - x.a_hat[i] + p.sigma_star;
    x.tau = 0.05;
    const model::ReducedState xe = model::reduce_state(x, p);
    worst_identity = std::max(worst_identity, std::abs(model::dist_to_goal(x, p) - model::dist_to_goal(xe)));
    const double dx = model::dist_to_goal(xe);
    const double dchi = model::dist_to_goal(model::transform_forward(xe, tr));
    sandwich = sandwich && dchi <= g_inv_norm * dx * (1.0 + 1e-12) && dx <= g_norm * dchi * (1.0 + 1e-12);
  }
  std::ostringstream d;
  d << "max distance gap " << fmt(worst_identity) << "; sandwich " << (sandwich ? "holds" : "violated");
  return {worst_identity <= 1e-12 && sandwich, d.str()};
}

// 7. Goal set forward invariance.
Outcome forward_invariance() {
  const model::NetworkParams p = testing::five_agent_params(7);
  const model::System sys = model::closed_loop_system(p);
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> c(-5.0, 5.0);
  std::uniform_real_distribution<double> tau(0.0, p.timer.T2);
  double worst = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    model::ClosedLoopState x;
    x.e = Vector(p.n, c(gen));
    x.eta = Vector(p.n, 0.0);
    x.a_hat = p.a;
    x.tau_star = testing::random_vector(gen, p.n, 0.0, 10.0);
    x.tau_hat = x.tau_star;
    x.u.resize(p.n);
    for (std::size_t i = 0; i < p.n; ++i) x.u[i] = -x.a_hat[i] + p.sigma_star;
    x.tau = tau(gen);
    const auto sol = hybrid::simulate(sys.flow, sys.jump, x.pack(), p.timer, {10.0, 200}, 1e-3);
    for (const hybrid::Sample& s : sol.samples) {
      worst = std::max(worst, model::dist_to_goal(s.x, model::GoalSet::A, p));
    }
  }
  return {worst <= 1e-7, "max distance " + fmt(worst)};
}

// 8. Estimator trajectories against their bound.
Outcome estimator_bound() {
  const cli::Scenario s = scenario("five_agent.json");
  const auto tr = graph::disagreement_transform(s.params.graph);
  const auto m = model::build_system_matrices(s.params, tr);
  const certify::CertificateReport r = certify::certify_all(s.params, *s.certificate);
  const model::System sys = model::estimator_system(m);
  const std::size_t dim = 2 * s.params.n;
  std::mt19937_64 gen(8);
  std::uniform_real_distribution<double> tau(0.0, s.params.timer.T2);
  double worst = -1e300;
  for (int trial = 0; trial < 20; ++trial) {
    Vector x0 = testing::random_vector(gen, dim, -2.0, 2.0);
    const double w0 = norm(x0);
    x0.push_back(tau(gen));
    const auto sol = hybrid::simulate(sys.flow, sys.jump, x0, s.params.timer, {20.0, 400}, 1e-3);
    for (const hybrid::Sample& x : sol.samples) {
      const double w = norm(std::span<const double>(x.x).first(dim));
      worst = std::max(worst, w - certify::estimator_bound(r, w0, x.t, x.j));
    }
  }
  return {worst <= 1e-9, "max |w| - bound " + fmt(worst)};
}

const char* robustness_name(robustness::NoiseKind kind) {
  switch (kind) {
    case robustness::NoiseKind::comm:
      return "comm";
    case robustness::NoiseKind::drift_output:
      return "drift_output";
    case robustness::NoiseKind::sigma_ref:
      return "sigma_ref";
  }
  return "unknown";
}

// 9. Input-to-state behaviour under the three noise models.
Outcome iss_suite() {
  const cli::Scenario s = scenario("five_agent.json");
  const auto tr = graph::disagreement_transform(s.params.graph);
  const auto m = model::build_system_matrices(s.params, tr);
  const Vector chi0 = model::transform_forward(model::reduce_state(s.initial, s.params), tr).pack();
  const model::System nominal = model::transformed_system(m);
  const auto ref = hybrid::simulate(nominal.flow, nominal.jump, chi0, s.params.timer, {10.0, 2000}, s.step);
  const Vector zero(s.params.n, 0.0);
  const model::ReducedState goal{zero, zero, zero, zero, s.initial.tau};

  bool bit_exact = true;
  bool monotone = true;
  bool eta_invariant = true;
  std::ostringstream d;
  using robustness::NoiseKind;
  for (NoiseKind kind : {NoiseKind::comm, NoiseKind::drift_output, NoiseKind::sigma_ref}) {
    robustness::NoiseConfig noise;
    noise.kind = kind;
    noise.distribution = robustness::UniformNoise{-1.0, 1.0};
    noise.seed = 99;
    const model::System quiet = robustness::perturbed_system(m, tr, noise);
    const auto sol = hybrid::simulate(quiet.flow, quiet.jump, chi0, s.params.timer, {10.0, 2000}, s.step);
    bit_exact = bit_exact && sol.samples.size() == ref.samples.size();
    for (std::size_t k = 0; bit_exact && k < sol.samples.size(); ++k) {
      bit_exact = sol.samples[k].t == ref.samples[k].t && sol.samples[k].x == ref.samples[k].x;
    }
    double previous = -1.0;
    d << robustness_name(kind) << " [";
    for (double level : {0.0, 1.0, 2.0, 4.0}) {
      noise.amplitude = 0.01 * level;
      const auto r = robustness::iss_experiment(s.params, *s.certificate, noise, goal, {20.0, 2002}, 4, s.step);
      monotone = monotone && r.steady_state_error >= previous;
      previous = r.steady_state_error;
      d << fmt(r.steady_state_error) << (level < 4.0 ? " " : "");
    }
    d << "]; ";
    if (kind == NoiseKind::comm) {
      noise.amplitude = 0.1;
      const model::System noisy = robustness::perturbed_system(m, tr, noise);
      const auto run = hybrid::simulate(noisy.flow, noisy.jump, chi0, s.params.timer, {10.0, 2000}, s.step);
      for (std::size_t k = 1; k < run.samples.size(); ++k) {
        if (run.samples[k].j != run.samples[k - 1].j) eta_invariant = eta_invariant && run.samples[k].x[1] == 0.0;
      }
    }
  }

  // Order-of-magnitude comparison with the published averages (not a pass condition).
  robustness::NoiseConfig comm;
  comm.kind = NoiseKind::comm;
  comm.amplitude = 0.1;
  comm.distribution = robustness::UniformNoise{0.0, 1.0};
  comm.seed = 1;
  robustness::NoiseConfig sigma;
  sigma.kind = NoiseKind::sigma_ref;
  sigma.amplitude = 0.15;
  sigma.distribution = robustness::UniformNoise{-1.0, 1.0};
  sigma.seed = 1;
  const model::ReducedState start = model::reduce_state(s.initial, s.params);
  const auto rc = robustness::iss_experiment(s.params, *s.certificate, comm, start, {60.0, 6002}, 4, s.step);
  const auto rs = robustness::iss_experiment(s.params, *s.certificate, sigma, start, {60.0, 6002}, 4, s.step);
  d << "reference: comm " << fmt(rc.steady_state_error) << " (published 0.0549), rate " << fmt(rs.steady_state_error)
    << " (published 0.0229); bit-exact " << bit_exact << ", monotone " << monotone << ", eta1 invariant "
    << eta_invariant;
  return {bit_exact && monotone && eta_invariant, d.str()};
}

// 10. Numerical kernels against independent references.
Outcome numerics_oracles() {
  std::mt19937_64 gen(10);
  double exp_err = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    Matrix a = testing::random_matrix(gen, 4, 4);
    a = a * (2.0 * std::uniform_real_distribution<double>(0.0, 1.0)(gen) / numerics::spectral_norm(a));
    Matrix sum = Matrix::identity(4);
    Matrix term = Matrix::identity(4);
    for (int k = 1; k <= 30; ++k) {
      term = term * a * (1.0 / k);
      sum = sum + term;
    }
    exp_err = std::max(exp_err, max_abs(numerics::mat_exp(a) - sum));
  }

  double eig_err = 0.0;
  const Vector k3 = numerics::sym_eigenvalues(graph::laplacian(testing::complete_graph(3)));
  eig_err = std::max({std::abs(k3[0]), std::abs(k3[1] - 3.0), std::abs(k3[2] - 3.0)});
  // Characteristic polynomial of the directed 3-cycle Laplacian: s (s^2 - 3 s + 3).
  const std::complex<double> roots[] = {{0.0, 0.0}, {1.5, -std::sqrt(3.0) / 2.0}, {1.5, std::sqrt(3.0) / 2.0}};
  const auto spec = numerics::spectrum(graph::laplacian(testing::directed_cycle(3)));
  for (std::size_t k = 0; k < 3; ++k) eig_err = std::max(eig_err, std::abs(spec[k] - roots[k]));

  const Matrix a{{-0.3, 2.0}, {-2.0, -0.1}};
  const Vector x0{1.0, -0.5};
  const Vector exact = numerics::mat_exp(a * 2.0) * x0;
  const hybrid::FlowMap flow = [&a](std::span<const double> x, int, std::span<double> dx) {
    dx[0] = a(0, 0) * x[0] + a(0, 1) * x[1];
    dx[1] = a(1, 0) * x[0] + a(1, 1) * x[1];
    dx[2] = -1.0;
  };
  const hybrid::JumpMap jump = [](std::span<const double> x, int, double) { return Vector(x.begin(), x.end()); };
  const hybrid::TimerConfig timer{3.0, 3.0, hybrid::SeededSchedule{1}};
  std::vector<double> errs;
  for (double h : {0.1, 0.05, 0.025}) {
    const auto sol = hybrid::simulate(flow, jump, {x0[0], x0[1], 3.0}, timer, {2.0, 0}, h);
    errs.push_back(std::hypot(sol.back().x[0] - exact[0], sol.back().x[1] - exact[1]));
  }
  const double order1 = std::log2(errs[0] / errs[1]);
  const double order2 = std::log2(errs[1] / errs[2]);
  std::ostringstream d;
  d << "mat_exp err " << fmt(exp_err) << ", eigen err " << fmt(eig_err) << ", RK4 observed order " << fmt(order1)
    << ", " << fmt(order2);
  const bool order_ok = std::abs(order1 - 4.0) < 0.3 && std::abs(order2 - 4.0) < 0.3;
  return {exp_err <= 1e-9 && eig_err <= 1e-8 && order_ok, d.str()};
}

std::set<int> parse_ids(const std::string& text) {
  std::set<int> ids;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) ids.insert(std::stoi(item));
  }
  return ids;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  std::string expect_fail;
  std::string only;
  app.add_option("--expect-fail", expect_fail, "comma-separated criteria expected to fail");
  app.add_option("--only", only, "comma-separated criteria to run");
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> criteria = {
      {1, "five-agent printed matrices reproduce the published constants", 5.0, printed_five_agent_constants},
      {2, "four-agent aperiodic conditions verified", 5.0, four_agent_conditions},
      {3, "five-agent synchronization below 1e-3 within 15 s", 10.0, five_agent_synchronization},
      {4, "Lyapunov function below the bound envelope", 0.0, lyapunov_domination},
      {5, "reduction and transform equivalence", 0.0, reduction_equivalence},
      {6, "distance identities under the state maps", 0.0, distance_algebra},
      {7, "goal set forward invariance", 0.0, forward_invariance},
      {8, "estimator trajectories below their bound", 0.0, estimator_bound},
      {9, "input-to-state behaviour under noise", 0.0, iss_suite},
      {10, "numerical kernels against references", 0.0, numerics_oracles},
  };

  const std::set<int> expected = parse_ids(expect_fail);
  const std::set<int> selected = parse_ids(only);
  std::set<int> failed;
  std::set<int> ran;
  for (const Criterion& c : criteria) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    ran.insert(c.id);
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.body();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    bool pass = o.pass;
    std::string timing = "runtime " + fmt(secs) + " s";
    if (c.time_limit > 0.0) {
      timing += " (limit " + fmt(c.time_limit) + " s)";
      pass = pass && secs < c.time_limit;
    }
    if (!pass) failed.insert(c.id);
    std::cout << "criterion " << c.id << ": " << (pass ? "PASS" : "FAIL") << "  " << c.title << "  [" << o.detail
              << "; " << timing << "]" << std::endl;
  }

  std::set<int> expected_ran;
  for (int id : expected)
    if (ran.count(id)) expected_ran.insert(id);
  std::cout << "failed:";
  for (int id : failed) std::cout << ' ' << id;
  std::cout << "\nexpected to fail:";
  for (int id : expected_ran) std::cout << ' ' << id;
  std::cout << std::endl;
  return failed == expected_ran ? 0 : 1;
}
