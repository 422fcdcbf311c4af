// Copyright 2026 hyntp-lab contributors
// SPDX-License-Identifier: Apache-2.0

// Serial reference loops versus the OpenMP loops for the certificate grid
// kernels and the noise-trial batch. Usage: hyntp-bench [scenario.json] [benchmark flags].

#include <benchmark/benchmark.h>

#include <cstring>
#include <string>

#include "hyntp/certify.hpp"
#include "hyntp/cli/scenario.hpp"
#include "hyntp/robustness.hpp"

namespace {

std::string g_scenario = HYNTP_DEFAULT_SCENARIO;

const hyntp::cli::Scenario& scenario() {
  static const hyntp::cli::Scenario s = hyntp::cli::load_scenario(g_scenario);
  return s;
}

hyntp::certify::Exec exec_of(const benchmark::State& state) {
  return state.range(0) == 0 ? hyntp::certify::Exec::serial : hyntp::certify::Exec::parallel;
}

void label(benchmark::State& state) { state.SetLabel(state.range(0) == 0 ? "serial" : "openmp"); }

void BM_JumpGrid(benchmark::State& state) {
  const auto& s = scenario();
  const auto tr = hyntp::graph::disagreement_transform(s.params.graph);
  const auto m = hyntp::model::build_system_matrices(s.params, tr);
  const auto nus = hyntp::certify::uniform_grid(s.params.timer.T1, s.params.timer.T2,
                                                static_cast<std::size_t>(state.range(1)));
  for (auto _ : state) {
    auto g = hyntp::certify::jump_grid(m.A_f2, m.A_g2, s.certificate->P1, nus, exec_of(state));
    benchmark::DoNotOptimize(g);
  }
  label(state);
}

void BM_CertifyAll(benchmark::State& state) {
  const auto& s = scenario();
  for (auto _ : state) {
    auto r = hyntp::certify::certify_all(s.params, *s.certificate, exec_of(state));
    benchmark::DoNotOptimize(r);
  }
  label(state);
}

void BM_IssTrials(benchmark::State& state) {
  const auto& s = scenario();
  hyntp::robustness::NoiseConfig noise;
  noise.kind = hyntp::robustness::NoiseKind::comm;
  noise.amplitude = 1e-3;
  noise.distribution = hyntp::robustness::UniformNoise{-1.0, 1.0};
  const auto x0 = hyntp::model::reduce_state(s.initial, s.params);
  const hyntp::hybrid::Horizon horizon{2.0, 1000};
  for (auto _ : state) {
    auto r = hyntp::robustness::iss_experiment(s.params, *s.certificate, noise, x0, horizon,
                                               static_cast<int>(state.range(1)), s.step, exec_of(state));
    benchmark::DoNotOptimize(r);
  }
  label(state);
}

BENCHMARK(BM_JumpGrid)->ArgsProduct({{0, 1}, {2001, 20001}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CertifyAll)->ArgsProduct({{0, 1}, {0}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_IssTrials)->ArgsProduct({{0, 1}, {4}})->Unit(benchmark::kMillisecond);

}  // namespace

int main(int argc, char** argv) {
  if (argc > 1 && std::strncmp(argv[1], "--", 2) != 0) {
    g_scenario = argv[1];
    for (int i = 1; i + 1 < argc; ++i) argv[i] = argv[i + 1];
    --argc;
  }
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}
