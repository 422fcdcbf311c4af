// Copyright 2026 hyntp-lab contributors
// SPDX-License-Identifier: Apache-2.0

#include "hyntp/cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "hyntp/cli/output.hpp"
#include "hyntp/error.hpp"
#include "hyntp/graph.hpp"
#include "hyntp/model.hpp"
#include "hyntp/robustness.hpp"

namespace hyntp::cli {

namespace {

constexpr double kReductionTolerance = 1e-6;

void write_json(const nlohmann::ordered_json& j, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << j.dump(2) << '\n';
  if (!out) throw Error("write failed for " + path.string());
}

double sup_diff(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DimensionError("sup_diff: length mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

std::span<const double> clocks(const hybrid::Sample& s, std::size_t n) {
  return std::span<const double>(s.x).subspan(0, n);
}

int run_simulate(const Scenario& s, const RunOptions& o, std::ostream& log) {
  const std::size_t n = s.params.n;
  const hybrid::HybridSolution sol = simulate_scenario(s);
  const bool domain_ok = hybrid::check_domain(sol, s.params.timer);

  if (s.outputs.csv) {
    const auto path = o.out_dir / (s.name + ".csv");
    write_csv(sol, closed_loop_labels(n), path);
    log << "wrote " << path.string() << '\n';
  }
  if (s.outputs.svg) {
    std::vector<Panel> panels;
    panels.push_back({"clock disagreement max|e_i - e_k|",
                      {make_series(sol, "disagreement",
                                   [n](const hybrid::Sample& p) { return model::disagreement(clocks(p, n)); })},
                      true});
    Panel drift{"drift estimate error a_hat_i - a_i", {}, false};
    for (std::size_t i = 0; i < n; ++i) {
      drift.series.push_back(make_series(sol, "agent " + std::to_string(i + 1), [&, i](const hybrid::Sample& p) {
        return p.x[4 * n + i] - s.params.a[i];
      }));
    }
    panels.push_back(std::move(drift));
    panels.push_back({"communication timer", {make_series(sol, "tau", [](const hybrid::Sample& p) {
                                                return p.x.back();
                                              })},
                      false});

    if (s.certificate) {
      const certify::CertificateReport r = certify::certify_all(s.params, *s.certificate, o.exec);
      if (r.ok) {
        const auto tr = graph::disagreement_transform(s.params.graph);
        const auto m = model::build_system_matrices(s.params, tr);
        auto chi_of = [&](const hybrid::Sample& p) {
          return model::transform_forward(
              model::reduce_state(model::ClosedLoopState::unpack(p.x, n), s.params), tr);
        };
        const model::TransformedState chi0 = chi_of(sol.samples.front());
        const double v0 = certify::lyapunov_value(chi0, m, *s.certificate);
        const double w0 = std::sqrt(vec::dot(chi0.w1, chi0.w1) + vec::dot(chi0.w2, chi0.w2));
        const hybrid::HybridTime start = sol.domain.start;
        Panel lyap{"Lyapunov function and certified envelope", {}, true};
        lyap.series.push_back(make_series(sol, "V", [&](const hybrid::Sample& p) {
          return certify::lyapunov_value(chi_of(p), m, *s.certificate);
        }));
        lyap.series.push_back(make_series(sol, "bound^2", [&](const hybrid::Sample& p) {
          const double b = certify::theorem_bound(r, v0, w0, p.t - start.t, p.j - start.j);
          return b * b;
        }));
        panels.push_back(std::move(lyap));
      } else {
        log << "certificate does not verify; envelope panel omitted\n";
      }
    }
    const auto path = o.out_dir / (s.name + ".svg");
    emit_plot(panels, path);
    log << "wrote " << path.string() << '\n';
  }

  const hybrid::Sample& last = sol.back();
  double drift_err = 0.0;
  for (std::size_t i = 0; i < n; ++i) drift_err = std::max(drift_err, std::abs(last.x[4 * n + i] - s.params.a[i]));
  log << "final (t=" << format_number(last.t) << ", j=" << last.j
      << "): disagreement=" << format_number(model::disagreement(clocks(last, n)))
      << " max|a_hat-a|=" << format_number(drift_err) << '\n';
  if (!domain_ok) {
    log << "hybrid time domain violates the dwell-time bounds\n";
    return exit_code::invariant_violated;
  }
  return exit_code::ok;
}

int run_certify(const Scenario& s, const RunOptions& o, std::ostream& log) {
  if (!s.certificate) {
    log << s.name << ": scenario has no certificate\n";
    return exit_code::usage;
  }
  const certify::CertificateReport r = certify::certify_all(s.params, *s.certificate, o.exec);
  nlohmann::ordered_json j;
  j["scenario"] = s.name;
  j["symmetrized"] = s.certificate_symmetrized;
  j["nu_grid_points"] = s.certificate->nu_grid_points;
  j["report"] = report_to_json(r);
  const auto path = o.out_dir / (s.name + ".certificate.json");
  write_json(j, path);
  log << "wrote " << path.string() << '\n';
  log << "flow LMIs " << (r.flow_lmis_ok ? "ok" : "FAILED") << ", jump contraction "
      << (r.jump_contraction_ok ? "ok" : "FAILED") << ", growth " << (r.growth_ok ? "ok" : "FAILED")
      << " (factor " << format_number(r.growth_factor) << ")\n";
  return r.ok ? exit_code::ok : exit_code::certification_failed;
}

int run_compare(const Scenario& s, const RunOptions& o, std::ostream& log) {
  const ReductionReport r = compare_reduction(s, s.horizon);
  nlohmann::ordered_json j;
  j["scenario"] = s.name;
  j["tolerance"] = kReductionTolerance;
  j["first_jump_time"] = r.first_jump_time;
  j["full_vs_reduced"] = r.full_vs_reduced;
  j["reduced_vs_transformed"] = r.reduced_vs_transformed;
  j["samples_full"] = r.samples_full;
  j["samples_transformed"] = r.samples_transformed;
  const auto path = o.out_dir / (s.name + ".reduction.json");
  write_json(j, path);
  log << "wrote " << path.string() << '\n';
  log << "max deviation: full vs reduced " << format_number(r.full_vs_reduced)
      << ", reduced vs transformed " << format_number(r.reduced_vs_transformed) << '\n';
  const bool ok = r.full_vs_reduced < kReductionTolerance && r.reduced_vs_transformed < kReductionTolerance;
  return ok ? exit_code::ok : exit_code::invariant_violated;
}

const char* kind_name(robustness::NoiseKind k) {
  switch (k) {
    case robustness::NoiseKind::comm:
      return "comm";
    case robustness::NoiseKind::drift_output:
      return "drift_output";
    case robustness::NoiseKind::sigma_ref:
      return "sigma_ref";
  }
  return "unknown";
}

int run_sweep(const Scenario& s, const RunOptions& o, std::ostream& log) {
  if (!s.noise) {
    log << s.name << ": scenario has no noise section\n";
    return exit_code::usage;
  }
  if (!s.certificate) {
    log << s.name << ": scenario has no certificate\n";
    return exit_code::usage;
  }
  const certify::CertificateReport cert = certify::certify_all(s.params, *s.certificate, o.exec);
  if (!cert.ok) {
    log << s.name << ": certificate does not verify; noise sweep needs a certified loop\n";
    return exit_code::certification_failed;
  }
  const NoiseSweep& sw = *s.noise;
  hybrid::Horizon horizon = s.horizon;
  if (sw.horizon > 0.0) {
    horizon.T = sw.horizon;
    horizon.J = static_cast<int>(std::ceil(horizon.T / s.params.timer.T1)) + 2;
  }
  model::ReducedState x0 = model::reduce_state(s.initial, s.params);
  if (!sw.from_initial) {
    const Vector zero(s.params.n, 0.0);
    x0 = {zero, zero, zero, zero, s.initial.tau};
  }

  nlohmann::ordered_json j;
  j["scenario"] = s.name;
  j["kind"] = kind_name(sw.noise.kind);
  j["base_amplitude"] = sw.noise.amplitude;
  j["trials"] = sw.trials;
  j["horizon"] = horizon.T;
  j["start"] = sw.from_initial ? "initial" : "synchronized";
  j["levels"] = nlohmann::ordered_json::array();
  bool monotone = true;
  double previous = -1.0;
  for (double level : sw.levels) {
    robustness::NoiseConfig nk = sw.noise;
    nk.amplitude = sw.noise.amplitude * level;
    const robustness::IssResult r =
        robustness::iss_experiment(s.params, *s.certificate, nk, x0, horizon, sw.trials, s.step, o.exec);
    nlohmann::ordered_json row;
    row["level"] = level;
    row["amplitude"] = nk.amplitude;
    row["steady_state_error"] = r.steady_state_error;
    row["max_error"] = r.max_error;
    row["trial_steady_state_error"] = nlohmann::ordered_json::array();
    for (const auto& t : r.trials) row["trial_steady_state_error"].push_back(t.steady_state_error);
    j["levels"].push_back(row);
    log << "amplitude " << format_number(nk.amplitude) << ": steady-state "
        << format_number(r.steady_state_error) << ", max " << format_number(r.max_error) << '\n';
    if (r.steady_state_error < previous) monotone = false;
    previous = r.steady_state_error;
  }
  j["monotone"] = monotone;
  const auto path = o.out_dir / (s.name + ".iss.json");
  write_json(j, path);
  log << "wrote " << path.string() << '\n';
  if (!monotone) {
    log << "steady-state error decreased with a larger noise amplitude\n";
    return exit_code::invariant_violated;
  }
  return exit_code::ok;
}

}  // namespace

std::optional<Command> parse_command(const std::string& name) {
  if (name == "simulate") return Command::simulate;
  if (name == "certify") return Command::certify;
  if (name == "compare-reduction") return Command::compare_reduction;
  if (name == "sweep-noise") return Command::sweep_noise;
  return std::nullopt;
}

std::string command_name(Command c) {
  switch (c) {
    case Command::simulate:
      return "simulate";
    case Command::certify:
      return "certify";
    case Command::compare_reduction:
      return "compare-reduction";
    case Command::sweep_noise:
      return "sweep-noise";
  }
  return "unknown";
}

Scenario apply_overrides(const Scenario& s, const RunOptions& options) {
  Scenario out = s;
  if (out.name.empty()) out.name = "scenario";
  if (options.seed) {
    if (auto* seeded = std::get_if<hybrid::SeededSchedule>(&out.params.timer.schedule)) {
      seeded->seed = *options.seed;
    }
    if (out.noise) out.noise->noise.seed = *options.seed;
  }
  if (options.step) {
    if (!(*options.step > 0.0)) throw ConfigError("--step must be positive");
    out.step = *options.step;
  }
  return out;
}

hybrid::HybridSolution simulate_scenario(const Scenario& s) {
  const model::System sys = model::closed_loop_system(s.params);
  return hybrid::simulate(sys.flow, sys.jump, s.initial.pack(), s.params.timer, s.horizon, s.step);
}

ReductionReport compare_reduction(const Scenario& s, hybrid::Horizon horizon) {
  const model::NetworkParams& p = s.params;
  const std::size_t n = p.n;
  ReductionReport report;

  // Closed loop from the scenario state; the error-coordinate system restarts from
  // the first post-jump state, where the input is consistent by construction.
  const model::System full = model::closed_loop_system(p);
  const hybrid::HybridSolution h = hybrid::simulate(full.flow, full.jump, s.initial.pack(), p.timer, horizon, s.step);
  auto first = std::find_if(h.samples.begin(), h.samples.end(), [](const hybrid::Sample& x) { return x.j >= 1; });
  if (first != h.samples.end()) {
    report.first_jump_time = first->t;
    const model::ClosedLoopState x1 = model::ClosedLoopState::unpack(first->x, n);
    const model::System reduced = model::reduced_system(p);
    const hybrid::HybridSolution he = hybrid::simulate(reduced.flow, reduced.jump,
                                                       model::reduce_state(x1, p).pack(), p.timer, horizon,
                                                       s.step, {first->t, 1});
    const auto offset = static_cast<std::size_t>(first - h.samples.begin());
    const std::size_t count = std::min(he.samples.size(), h.samples.size() - offset);
    for (std::size_t k = 0; k < count; ++k) {
      const hybrid::Sample& a = h.samples[offset + k];
      const hybrid::Sample& b = he.samples[k];
      if (a.j != b.j || std::abs(a.t - b.t) > 1e-12) throw Error("compare_reduction: sample grids differ");
      const model::ClosedLoopState xa = model::ClosedLoopState::unpack(a.x, n);
      const model::ClosedLoopState lifted =
          model::lift_state(model::ReducedState::unpack(b.x, n), xa.tau_hat, xa.tau_star, p);
      report.full_vs_reduced = std::max(report.full_vs_reduced, sup_diff(a.x, lifted.pack()));
    }
    report.samples_full = count;
  }

  // Error coordinates against the transformed system mapped back, both from the start.
  const auto tr = graph::disagreement_transform(p.graph);
  const auto m = model::build_system_matrices(p, tr);
  const model::ReducedState xi0 = model::reduce_state(s.initial, p);
  const model::System reduced = model::reduced_system(p);
  const model::System transformed = model::transformed_system(m);
  const hybrid::HybridSolution he = hybrid::simulate(reduced.flow, reduced.jump, xi0.pack(), p.timer, horizon, s.step);
  const hybrid::HybridSolution ht = hybrid::simulate(transformed.flow, transformed.jump,
                                                     model::transform_forward(xi0, tr).pack(), p.timer, horizon,
                                                     s.step);
  const std::size_t count = std::min(he.samples.size(), ht.samples.size());
  for (std::size_t k = 0; k < count; ++k) {
    const hybrid::Sample& a = he.samples[k];
    const hybrid::Sample& b = ht.samples[k];
    if (a.j != b.j || std::abs(a.t - b.t) > 1e-12) throw Error("compare_reduction: sample grids differ");
    const model::ReducedState back = model::transform_inverse(model::TransformedState::unpack(b.x, n), tr);
    report.reduced_vs_transformed = std::max(report.reduced_vs_transformed, sup_diff(a.x, back.pack()));
  }
  report.samples_transformed = count;
  return report;
}

int run(const Scenario& scenario, Command command, const RunOptions& options, std::ostream& log) {
  try {
    const Scenario s = apply_overrides(scenario, options);
    switch (command) {
      case Command::simulate:
        return run_simulate(s, options, log);
      case Command::certify:
        return run_certify(s, options, log);
      case Command::compare_reduction:
        return run_compare(s, options, log);
      case Command::sweep_noise:
        return run_sweep(s, options, log);
    }
  } catch (const NumericalBlowup& e) {
    log << "error: " << e.what() << '\n';
    return exit_code::invariant_violated;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return exit_code::usage;
  }
  return exit_code::usage;
}

}  // namespace hyntp::cli
