// Copyright 2026 hyntp-lab contributors
// SPDX-License-Identifier: Apache-2.0

// hyntp-lab <command> <scenario.json>... [--out dir] [--seed n] [--step s] [--jobs k]

#include <algorithm>
#include <atomic>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "hyntp/cli/commands.hpp"
#include "hyntp/cli/scenario.hpp"
#include "hyntp/error.hpp"

namespace {

struct Job {
  std::string path;
  std::ostringstream log;
  int code = 0;
};

void execute(Job& job, hyntp::cli::Command command, const hyntp::cli::RunOptions& options) {
  try {
    const hyntp::cli::Scenario s = hyntp::cli::load_scenario(job.path);
    job.log << "[" << s.name << "] " << hyntp::cli::command_name(command) << '\n';
    job.code = hyntp::cli::run(s, command, options, job.log);
  } catch (const std::exception& e) {
    job.log << "error: " << e.what() << '\n';
    job.code = hyntp::cli::exit_code::usage;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hybrid clock synchronization laboratory"};
  std::string command_text;
  std::vector<std::string> paths;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  double step = 0.0;
  unsigned jobs = 1;
  app.add_option("command", command_text, "simulate | certify | compare-reduction | sweep-noise")
      ->required()
      ->check(CLI::IsMember({"simulate", "certify", "compare-reduction", "sweep-noise"}));
  app.add_option("scenarios", paths, "scenario JSON files")->required()->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "output directory");
  auto* seed_opt = app.add_option("--seed", seed, "override the timer and noise seeds");
  auto* step_opt = app.add_option("--step", step, "override the integration step")->check(CLI::PositiveNumber);
  app.add_option("--jobs", jobs, "scenarios run concurrently")->check(CLI::Range(1u, 256u));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : hyntp::cli::exit_code::usage;
  }

  hyntp::cli::RunOptions options;
  options.out_dir = out_dir;
  if (*seed_opt) options.seed = seed;
  if (*step_opt) options.step = step;
  const hyntp::cli::Command command = *hyntp::cli::parse_command(command_text);

  std::vector<Job> work(paths.size());
  for (std::size_t i = 0; i < paths.size(); ++i) work[i].path = paths[i];

  const unsigned workers = std::min<unsigned>(jobs, static_cast<unsigned>(work.size()));
  if (workers <= 1) {
    for (Job& job : work) execute(job, command, options);
  } else {
    // Each scenario owns its state; logs are printed afterwards in argument order.
    options.exec = hyntp::certify::Exec::serial;
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < work.size(); i = next++) execute(work[i], command, options);
      });
    }
    for (auto& t : pool) t.join();
  }

  int code = hyntp::cli::exit_code::ok;
  for (const Job& job : work) {
    std::cerr << job.log.str();
    code = std::max(code, job.code);
  }
  return code;
}
