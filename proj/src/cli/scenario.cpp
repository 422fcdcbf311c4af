// Copyright 2026 hyntp-lab contributors
// SPDX-License-Identifier: Apache-2.0

#include "hyntp/cli/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "hyntp/error.hpp"
#include "json.hpp"

namespace hyntp::cli {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& origin, const std::string& path, const std::string& what) {
  throw ConfigError(origin + ": " + path + ": " + what);
}

// Object view that records consumed keys so leftovers can be rejected.
class Fields {
 public:
  Fields(const json& j, std::string origin, std::string path)
      : j_(j), origin_(std::move(origin)), path_(std::move(path)) {
    if (!j_.is_object()) fail(origin_, where(), "expected an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  const json& at(const std::string& key) {
    used_.insert(key);
    if (!j_.contains(key)) fail(origin_, where(key), "missing required field");
    return j_.at(key);
  }

  const json* find(const std::string& key) {
    used_.insert(key);
    return j_.contains(key) ? &j_.at(key) : nullptr;
  }

  double number(const std::string& key) { return as_number(at(key), where(key)); }

  double number_or(const std::string& key, double fallback) {
    const json* v = find(key);
    return v ? as_number(*v, where(key)) : fallback;
  }

  bool boolean_or(const std::string& key, bool fallback) {
    const json* v = find(key);
    if (!v) return fallback;
    if (!v->is_boolean()) fail(origin_, where(key), "expected true or false");
    return v->get<bool>();
  }

  std::uint64_t unsigned_integer(const std::string& key) {
    const json& v = at(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
      fail(origin_, where(key), "expected a non-negative integer");
    }
    return v.get<std::uint64_t>();
  }

  Vector vector(const std::string& key) { return as_vector(at(key), where(key)); }

  Matrix matrix(const std::string& key) {
    const json& v = at(key);
    const std::string p = where(key);
    if (!v.is_array() || v.empty()) fail(origin_, p, "expected a non-empty array of rows");
    std::vector<Vector> rows;
    for (std::size_t i = 0; i < v.size(); ++i) {
      rows.push_back(as_vector(v[i], p + "[" + std::to_string(i) + "]"));
      if (rows.back().size() != rows.front().size()) fail(origin_, p, "rows have different lengths");
    }
    Matrix m(rows.size(), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (std::size_t k = 0; k < rows[i].size(); ++k) m(i, k) = rows[i][k];
    return m;
  }

  void finish() const {
    for (const auto& item : j_.items()) {
      if (!used_.count(item.key())) fail(origin_, where(item.key()), "unknown field");
    }
  }

  std::string where(const std::string& key = "") const {
    if (key.empty()) return path_.empty() ? "<root>" : path_;
    return path_.empty() ? key : path_ + "." + key;
  }

  double as_number(const json& v, const std::string& p) const {
    if (!v.is_number()) fail(origin_, p, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) fail(origin_, p, "expected a finite number");
    return d;
  }

  Vector as_vector(const json& v, const std::string& p) const {
    if (!v.is_array()) fail(origin_, p, "expected an array of numbers");
    Vector out;
    out.reserve(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
      out.push_back(as_number(v[i], p + "[" + std::to_string(i) + "]"));
    }
    return out;
  }

  const std::string& origin() const { return origin_; }

 private:
  const json& j_;
  std::string origin_;
  std::string path_;
  std::set<std::string> used_;
};

graph::Digraph parse_graph(Fields& f) {
  const std::string p = f.where();
  const bool by_matrix = f.has("adjacency");
  const bool by_edges = f.has("edges") || f.has("nodes");
  if (by_matrix == by_edges) fail(f.origin(), p, "give either adjacency or nodes plus edges");
  try {
    if (by_matrix) return graph::Digraph::from_adjacency(f.matrix("adjacency"));
    const std::uint64_t n = f.unsigned_integer("nodes");
    const json& edges = f.at("edges");
    if (!edges.is_array()) fail(f.origin(), f.where("edges"), "expected an array of [from, to] pairs");
    std::vector<std::pair<std::size_t, std::size_t>> list;
    for (std::size_t i = 0; i < edges.size(); ++i) {
      const json& e = edges[i];
      const std::string ep = f.where("edges") + "[" + std::to_string(i) + "]";
      if (!e.is_array() || e.size() != 2 || !e[0].is_number_unsigned() || !e[1].is_number_unsigned()) {
        fail(f.origin(), ep, "expected a pair of non-negative integers");
      }
      list.emplace_back(e[0].get<std::size_t>(), e[1].get<std::size_t>());
    }
    return graph::Digraph::from_edges(static_cast<std::size_t>(n), list);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    fail(f.origin(), p, e.what());
  }
}

hybrid::TimerConfig parse_timer(Fields& f) {
  hybrid::TimerConfig t;
  t.T1 = f.number("T1");
  t.T2 = f.number("T2");
  const bool seeded = f.has("seed");
  const bool listed = f.has("resets");
  if (seeded && listed) fail(f.origin(), f.where(), "give at most one of seed and resets");
  if (listed) {
    t.schedule = hybrid::ExplicitSchedule{f.vector("resets")};
  } else {
    t.schedule = hybrid::SeededSchedule{seeded ? f.unsigned_integer("seed") : 0};
  }
  try {
    t.validate();
  } catch (const Error& e) {
    fail(f.origin(), f.where(), e.what());
  }
  return t;
}

Vector vector_or(Fields& f, const std::string& key, std::size_t n, const Vector& fallback) {
  if (!f.has(key)) {
    f.find(key);
    return fallback;
  }
  Vector v = f.vector(key);
  if (v.size() != n) fail(f.origin(), f.where(key), "length must equal the agent count " + std::to_string(n));
  return v;
}

model::ClosedLoopState parse_initial(Fields& f, const model::NetworkParams& p, model::ReferenceClock& ref) {
  const std::size_t n = p.n;
  model::ClosedLoopState x;
  x.e = vector_or(f, "e", n, {});
  x.eta = vector_or(f, "eta", n, {});
  if (x.e.empty()) fail(f.origin(), f.where("e"), "missing required field");
  if (x.eta.empty()) fail(f.origin(), f.where("eta"), "missing required field");
  x.tau_star = vector_or(f, "tau_star", n, Vector(n, 0.0));
  x.a_hat = vector_or(f, "a_hat", n, Vector(n, 1.0));
  x.tau_hat = vector_or(f, "tau_hat", n, x.tau_star);
  Vector u_default(n);
  for (std::size_t i = 0; i < n; ++i) u_default[i] = x.eta[i] - x.a_hat[i] + p.sigma_star;
  x.u = vector_or(f, "u", n, u_default);
  x.tau = f.number_or("tau", 0.0);
  if (x.tau < 0.0 || x.tau > p.timer.T2) fail(f.origin(), f.where("tau"), "timer must lie in [0, T2]");
  ref.r0 = f.number_or("r0", 0.0);
  ref.sigma_star = p.sigma_star;
  return x;
}

certify::Certificate parse_certificate(Fields& f, std::size_t n, bool& symmetrized) {
  certify::Certificate c;
  c.P1 = f.matrix("P1");
  c.P2 = f.matrix("P2");
  c.P3 = f.matrix("P3");
  c.epsilon_young = f.number("epsilon");
  c.gamma_split = f.number_or("gamma_split", c.gamma_split);
  if (f.has("nu_grid_points")) {
    const std::uint64_t k = f.unsigned_integer("nu_grid_points");
    if (k < 2) fail(f.origin(), f.where("nu_grid_points"), "need at least 2 grid points");
    c.nu_grid_points = static_cast<std::size_t>(k);
  }
  symmetrized = f.boolean_or("symmetrize", false);
  if (symmetrized) {
    for (Matrix* m : {&c.P1, &c.P2, &c.P3}) {
      if (m->square()) *m = (*m + m->transpose()) * 0.5;
    }
  }
  try {
    c.validate(n);
  } catch (const Error& e) {
    fail(f.origin(), f.where(), e.what());
  }
  return c;
}

NoiseSweep parse_noise(Fields& f) {
  NoiseSweep s;
  const json& kind = f.at("kind");
  if (!kind.is_string()) fail(f.origin(), f.where("kind"), "expected a string");
  const std::string k = kind.get<std::string>();
  if (k == "comm") {
    s.noise.kind = robustness::NoiseKind::comm;
  } else if (k == "drift_output") {
    s.noise.kind = robustness::NoiseKind::drift_output;
  } else if (k == "sigma_ref") {
    s.noise.kind = robustness::NoiseKind::sigma_ref;
  } else {
    fail(f.origin(), f.where("kind"), "expected comm, drift_output or sigma_ref");
  }
  s.noise.amplitude = f.number("amplitude");
  const bool uniform = f.has("uniform");
  const bool constant = f.has("constant");
  if (uniform && constant) fail(f.origin(), f.where(), "give at most one of uniform and constant");
  if (constant) {
    s.noise.distribution = robustness::ConstantNoise{f.number("constant")};
  } else if (uniform) {
    const Vector b = f.vector("uniform");
    if (b.size() != 2) fail(f.origin(), f.where("uniform"), "expected [lo, hi]");
    s.noise.distribution = robustness::UniformNoise{b[0], b[1]};
  } else {
    s.noise.distribution = robustness::UniformNoise{-1.0, 1.0};
  }
  s.noise.seed = f.has("seed") ? f.unsigned_integer("seed") : 0;
  if (f.has("trials")) {
    const std::uint64_t t = f.unsigned_integer("trials");
    if (t < 1 || t > 100000) fail(f.origin(), f.where("trials"), "trials must lie in [1, 100000]");
    s.trials = static_cast<int>(t);
  }
  if (f.has("levels")) {
    s.levels = f.vector("levels");
    if (s.levels.empty()) fail(f.origin(), f.where("levels"), "need at least one level");
    for (double l : s.levels) {
      if (l < 0.0) fail(f.origin(), f.where("levels"), "levels must be non-negative");
    }
  }
  s.horizon = f.number_or("horizon", 0.0);
  if (const json* start = f.find("start")) {
    if (*start == "initial") {
      s.from_initial = true;
    } else if (*start != "synchronized") {
      fail(f.origin(), f.where("start"), "expected initial or synchronized");
    }
  }
  if (s.horizon < 0.0) fail(f.origin(), f.where("horizon"), "horizon must be non-negative");
  try {
    s.noise.validate();
  } catch (const Error& e) {
    fail(f.origin(), f.where(), e.what());
  }
  return s;
}

std::size_t line_of(const std::string& text, std::size_t byte) {
  const std::size_t end = std::min(byte, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<long>(end), '\n'));
}

}  // namespace

Scenario parse_scenario(const std::string& text, const std::string& origin) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(origin + ": line " + std::to_string(line_of(text, e.byte)) + ": " + e.what());
  }

  Fields top(root, origin, "");
  const json& schema = top.at("schema");
  if (!schema.is_number_integer() || schema.get<int>() != 1) {
    fail(origin, "schema", "unsupported schema version (expected 1)");
  }

  Scenario s;
  if (const json* name = top.find("name")) {
    if (!name->is_string() || name->get<std::string>().empty()) fail(origin, "name", "expected a non-empty string");
    s.name = name->get<std::string>();
    if (s.name.find_first_of("/\\") != std::string::npos) fail(origin, "name", "must not contain path separators");
  }

  Fields g(top.at("graph"), origin, "graph");
  graph::Digraph digraph = parse_graph(g);
  g.finish();

  Fields t(top.at("timer"), origin, "timer");
  hybrid::TimerConfig timer = parse_timer(t);
  t.finish();

  Fields pf(top.at("params"), origin, "params");
  Vector drift = pf.vector("drift");
  model::NetworkParams params{digraph.size(), std::move(drift), pf.number("h"), pf.number("gamma"),
                              pf.number("mu"), pf.number_or("sigma_star", 1.0), digraph, timer};
  pf.finish();
  try {
    params.validate();
  } catch (const Error& e) {
    fail(origin, "params", e.what());
  }
  s.params = params;

  Fields init(top.at("initial"), origin, "initial");
  s.initial = parse_initial(init, s.params, s.reference);
  init.finish();

  Fields hz(top.at("horizon"), origin, "horizon");
  s.horizon.T = hz.number("T");
  if (!(s.horizon.T > 0.0)) fail(origin, "horizon.T", "horizon must be positive");
  if (hz.has("J")) {
    const std::uint64_t jmax = hz.unsigned_integer("J");
    if (jmax < 1 || jmax > 100000000) fail(origin, "horizon.J", "J must lie in [1, 1e8]");
    s.horizon.J = static_cast<int>(jmax);
  } else {
    const double bound = std::ceil(s.horizon.T / s.params.timer.T1) + 2.0;
    s.horizon.J = static_cast<int>(std::min(bound, 1e8));
  }
  hz.finish();

  s.step = top.number_or("step", s.step);
  if (!(s.step > 0.0)) fail(origin, "step", "step must be positive");

  if (const json* cert = top.find("certificate")) {
    Fields cf(*cert, origin, "certificate");
    s.certificate = parse_certificate(cf, s.params.n, s.certificate_symmetrized);
    cf.finish();
  }
  if (const json* noise = top.find("noise")) {
    Fields nf(*noise, origin, "noise");
    s.noise = parse_noise(nf);
    nf.finish();
  }
  if (const json* out = top.find("outputs")) {
    Fields of(*out, origin, "outputs");
    s.outputs.csv = of.boolean_or("csv", true);
    s.outputs.svg = of.boolean_or("svg", true);
    of.finish();
  }
  top.finish();
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path.string() + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  Scenario s = parse_scenario(buf.str(), path.string());
  if (s.name.empty()) s.name = path.stem().string();
  return s;
}

}  // namespace hyntp::cli
