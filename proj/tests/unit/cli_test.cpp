// Copyright 2026 hyntp-lab contributors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "fixtures.hpp"
#include "hyntp/cli/commands.hpp"
#include "hyntp/cli/output.hpp"
#include "hyntp/cli/scenario.hpp"
#include "hyntp/error.hpp"
#include "json.hpp"

namespace hyntp::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

json five_agent_json() {
  std::ifstream in(testing::scenario_path("five_agent.json"));
  return json::parse(in);
}

// Five-agent scenario cut down to a short horizon.
Scenario short_scenario(double T = 2.0) {
  json j = five_agent_json();
  j["horizon"] = {{"T", T}};
  j["name"] = "short";
  return parse_scenario(j.dump(), "short.json");
}

std::string config_error(const std::string& text) {
  try {
    parse_scenario(text, "cfg.json");
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

class TempDir {
 public:
  TempDir() : path_(fs::temp_directory_path() / ("hyntp_cli_test_" + std::to_string(::getpid()) + "_" +
                                                 std::to_string(counter_++))) {
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  static inline int counter_ = 0;
  fs::path path_;
};

int run_lab(const std::string& args) {
  const std::string cmd = std::string(HYNTP_LAB_EXE) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST(Scenario, BundledScenariosLoad) {
  for (const char* file : {"five_agent.json", "five_agent_printed_p.json", "four_agent_aperiodic.json",
                           "four_agent_periodic.json", "four_agent_directed_cycle.json"}) {
    const Scenario s = load_scenario(testing::scenario_path(file));
    EXPECT_TRUE(s.certificate.has_value()) << file;
    EXPECT_FALSE(s.name.empty());
  }
  const Scenario s = load_scenario(testing::scenario_path("five_agent.json"));
  EXPECT_EQ(s.name, "five_agent");
  EXPECT_EQ(s.params.n, 5u);
  EXPECT_EQ(s.params.h, -1.3);
  EXPECT_EQ(s.params.gamma, 0.125);
  EXPECT_EQ(s.params.mu, 3.0);
  EXPECT_EQ(s.params.timer.T1, 0.01);
  EXPECT_EQ(s.params.timer.T2, 0.1);
  EXPECT_EQ(s.initial.tau, 0.05);
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_EQ(s.initial.a_hat[i], 1.0);
    EXPECT_EQ(s.initial.tau_hat[i], s.initial.tau_star[i]);
    EXPECT_EQ(s.initial.u[i], s.initial.eta[i] - s.initial.a_hat[i] + s.params.sigma_star);
  }
  EXPECT_EQ(s.horizon.J, static_cast<int>(std::ceil(60.0 / 0.01)) + 2);
  const Scenario ring = load_scenario(testing::scenario_path("four_agent_periodic.json"));
  EXPECT_EQ(ring.params.timer.T1, ring.params.timer.T2);
}

TEST(Scenario, GraphFromEdgeList) {
  json j = five_agent_json();
  j["graph"] = {{"nodes", 5}, {"edges", {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 0}, {0, 4}}}};
  j.erase("certificate");
  const Scenario s = parse_scenario(j.dump(), "edges.json");
  EXPECT_EQ(s.params.graph.neighbours(0), (std::vector<std::size_t>{1, 4}));
}

TEST(Scenario, ReportsMissingField) {
  json j = five_agent_json();
  j["timer"].erase("T1");
  const std::string msg = config_error(j.dump());
  EXPECT_NE(msg.find("cfg.json"), std::string::npos) << msg;
  EXPECT_NE(msg.find("T1"), std::string::npos) << msg;
}

TEST(Scenario, RejectsUnknownField) {
  json j = five_agent_json();
  j["params"]["gama"] = 0.1;
  const std::string msg = config_error(j.dump());
  EXPECT_NE(msg.find("params.gama"), std::string::npos) << msg;
  EXPECT_NE(msg.find("unknown field"), std::string::npos) << msg;
}

TEST(Scenario, ReportsLineOfSyntaxError) {
  const std::string msg = config_error("{\n  \"schema\": 1,\n  \"name\": \"x\",,\n}\n");
  EXPECT_NE(msg.find("line 3"), std::string::npos) << msg;
}

TEST(Scenario, RejectsInvalidValues) {
  json j = five_agent_json();
  j["schema"] = 2;
  EXPECT_FALSE(config_error(j.dump()).empty());
  j = five_agent_json();
  j["timer"]["T2"] = 0.001;
  EXPECT_FALSE(config_error(j.dump()).empty());
  j = five_agent_json();
  j["params"]["drift"] = {1.0, 1.0};
  EXPECT_FALSE(config_error(j.dump()).empty());
  j = five_agent_json();
  j["initial"]["tau"] = 5.0;
  EXPECT_FALSE(config_error(j.dump()).empty());
  j = five_agent_json();
  j["name"] = "../escape";
  EXPECT_FALSE(config_error(j.dump()).empty());
  j = five_agent_json();
  j["certificate"]["P2"] = {{1.0, 0.0}, {0.0, -1.0}};
  EXPECT_FALSE(config_error(j.dump()).empty());
  j = five_agent_json();
  j["noise"]["kind"] = "thermal";
  EXPECT_FALSE(config_error(j.dump()).empty());
}

TEST(Commands, ParseAndName) {
  for (const char* name : {"simulate", "certify", "compare-reduction", "sweep-noise"}) {
    const auto c = parse_command(name);
    ASSERT_TRUE(c.has_value());
    EXPECT_EQ(command_name(*c), name);
  }
  EXPECT_FALSE(parse_command("plot").has_value());
}

TEST(Commands, OverridesReplaceSeedAndStep) {
  RunOptions o;
  o.seed = 42;
  o.step = 5e-4;
  const Scenario s = apply_overrides(load_scenario(testing::scenario_path("five_agent.json")), o);
  EXPECT_EQ(std::get<hybrid::SeededSchedule>(s.params.timer.schedule).seed, 42u);
  EXPECT_EQ(s.noise->noise.seed, 42u);
  EXPECT_EQ(s.step, 5e-4);
}

TEST(Output, NumbersRoundTrip) {
  for (double v : {0.1, -1.3, 1e-300, 123456.789, 2.0 / 3.0}) {
    EXPECT_EQ(std::strtod(format_number(v).c_str(), nullptr), v);
  }
}

TEST(Output, ReportKeysAreOrdered) {
  const Scenario s = load_scenario(testing::scenario_path("five_agent.json"));
  const nlohmann::ordered_json j = report_to_json(certify::certify_all(s.params, *s.certificate));
  ASSERT_GE(j.size(), 4u);
  EXPECT_EQ(j.begin().key(), "ok");
  EXPECT_TRUE(j["ok"].get<bool>());
  for (const char* key : {"kappa1", "kappa_bar1", "kappa_bar2", "alpha2", "growth_factor", "worst_nu"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
}

TEST(Simulate, CsvHeaderRowsAndRoundTrip) {
  TempDir dir;
  const Scenario s = short_scenario();
  RunOptions o;
  o.out_dir = dir.path();
  std::ostringstream log;
  ASSERT_EQ(run(s, Command::simulate, o, log), exit_code::ok) << log.str();
  std::ifstream in(dir.path() / "short.csv");
  std::string line;
  ASSERT_TRUE(std::getline(in, line));
  const auto header = split(line, ',');
  ASSERT_EQ(header.size(), 2u + 6u * 5u + 1u);
  EXPECT_EQ(header[0], "t");
  EXPECT_EQ(header[1], "j");
  for (int i = 0; i < 5; ++i) EXPECT_EQ(header[2 + i], "e" + std::to_string(i + 1));
  EXPECT_EQ(header.back(), "tau");

  const hybrid::HybridSolution sol = simulate_scenario(s);
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    const auto cells = split(line, ',');
    ASSERT_EQ(cells.size(), header.size());
    ASSERT_LT(rows, sol.samples.size());
    const hybrid::Sample& sample = sol.samples[rows];
    EXPECT_EQ(std::strtod(cells[0].c_str(), nullptr), sample.t);
    EXPECT_EQ(std::stoi(cells[1]), sample.j);
    for (std::size_t k = 0; k < sample.x.size(); ++k) EXPECT_EQ(std::strtod(cells[2 + k].c_str(), nullptr), sample.x[k]);
    ++rows;
  }
  EXPECT_EQ(rows, sol.samples.size());
  EXPECT_GE(rows, 2 * sol.domain.jump_times.size());
  EXPECT_TRUE(fs::exists(dir.path() / "short.svg"));
  EXPECT_NE(read_file(dir.path() / "short.svg").find("<svg"), std::string::npos);
}

TEST(Simulate, OutputsAreByteIdenticalAcrossRuns) {
  TempDir a;
  TempDir b;
  const Scenario s = short_scenario(1.0);
  std::ostringstream log;
  RunOptions o;
  o.out_dir = a.path();
  ASSERT_EQ(run(s, Command::simulate, o, log), exit_code::ok);
  o.out_dir = b.path();
  ASSERT_EQ(run(s, Command::simulate, o, log), exit_code::ok);
  EXPECT_EQ(read_file(a.path() / "short.csv"), read_file(b.path() / "short.csv"));
  EXPECT_EQ(read_file(a.path() / "short.svg"), read_file(b.path() / "short.svg"));
}

TEST(Certify, WritesReport) {
  TempDir dir;
  RunOptions o;
  o.out_dir = dir.path();
  std::ostringstream log;
  const Scenario s = load_scenario(testing::scenario_path("five_agent.json"));
  ASSERT_EQ(run(s, Command::certify, o, log), exit_code::ok) << log.str();
  const json j = json::parse(read_file(dir.path() / "five_agent.certificate.json"));
  EXPECT_EQ(j["scenario"], "five_agent");
  EXPECT_TRUE(j["report"]["ok"].get<bool>());
}

TEST(SweepNoise, RequiresNoiseSection) {
  json j = five_agent_json();
  j.erase("noise");
  const Scenario s = parse_scenario(j.dump(), "quiet.json");
  TempDir dir;
  RunOptions o;
  o.out_dir = dir.path();
  std::ostringstream log;
  EXPECT_EQ(run(s, Command::sweep_noise, o, log), exit_code::usage);
}

TEST(Executable, ExitCodes) {
  TempDir dir;
  const std::string out = " --out " + dir.path().string();
  EXPECT_EQ(run_lab("certify " + testing::scenario_path("five_agent.json") + out), 0);
  EXPECT_EQ(run_lab("certify " + testing::scenario_path("five_agent_printed_p.json") + out), 2);
  EXPECT_EQ(run_lab("compare-reduction " + testing::scenario_path("four_agent_directed_cycle.json") + out), 0);
  EXPECT_EQ(run_lab("certify " + testing::scenario_path("five_agent.json") + " " +
                    testing::scenario_path("five_agent_printed_p.json") + " --jobs 2" + out),
            2);
  EXPECT_NE(run_lab("certify /nonexistent/scenario.json" + out), 0);
  EXPECT_NE(run_lab("plot " + testing::scenario_path("five_agent.json") + out), 0);
  EXPECT_TRUE(fs::exists(dir.path() / "four_agent_directed_cycle.reduction.json"));
}

}  // namespace
}  // namespace hyntp::cli
