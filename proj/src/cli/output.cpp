// Copyright 2026 hyntp-lab contributors
// SPDX-License-Identifier: Apache-2.0

#include "hyntp/cli/output.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "hyntp/error.hpp"

namespace hyntp::cli {

namespace {

constexpr double kWidth = 960.0;
constexpr double kPanelHeight = 240.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 170.0;
constexpr double kTop = 36.0;
constexpr double kBottom = 34.0;
constexpr std::size_t kMaxPointsPerSeries = 4000;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::ofstream open_for_write(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  return out;
}

std::string fmt(double v, const char* spec) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

double transform_y(double y, bool log_scale) {
  if (!log_scale) return y;
  return std::log10(std::max(y, 1e-300));
}

}  // namespace

std::string format_number(double v) { return fmt(v, "%.17g"); }

std::vector<std::string> closed_loop_labels(std::size_t n) {
  std::vector<std::string> labels;
  for (const char* base : {"e", "u", "eta", "tau_star", "a_hat", "tau_hat"})
    for (std::size_t i = 1; i <= n; ++i) labels.push_back(base + std::to_string(i));
  labels.emplace_back("tau");
  return labels;
}

void write_csv(const hybrid::HybridSolution& sol, const std::vector<std::string>& labels,
               const std::filesystem::path& path) {
  std::ofstream out = open_for_write(path);
  out << "t,j";
  for (const auto& l : labels) out << ',' << l;
  out << '\n';
  for (const auto& s : sol.samples) {
    if (s.x.size() != labels.size()) throw DimensionError("write_csv: label count mismatch");
    out << format_number(s.t) << ',' << s.j;
    for (double v : s.x) out << ',' << format_number(v);
    out << '\n';
  }
  if (!out) throw Error("write failed for " + path.string());
}

Series make_series(const hybrid::HybridSolution& sol, std::string label,
                   const std::function<double(const hybrid::Sample&)>& value) {
  Series s{std::move(label), {}, {}, {}};
  s.t.reserve(sol.samples.size());
  s.j.reserve(sol.samples.size());
  s.y.reserve(sol.samples.size());
  for (const auto& p : sol.samples) {
    s.t.push_back(p.t);
    s.j.push_back(p.j);
    s.y.push_back(value(p));
  }
  return s;
}

void emit_plot(const std::vector<Panel>& panels, const std::filesystem::path& path) {
  std::ostringstream svg;
  const double height = kPanelHeight * static_cast<double>(panels.size());
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << height
      << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  for (std::size_t pi = 0; pi < panels.size(); ++pi) {
    const Panel& panel = panels[pi];
    const double y0 = kPanelHeight * static_cast<double>(pi);
    const double plot_w = kWidth - kLeft - kRight;
    const double plot_h = kPanelHeight - kTop - kBottom;

    double tmin = std::numeric_limits<double>::infinity(), tmax = -tmin;
    double ymin = tmin, ymax = -tmin;
    for (const Series& s : panel.series) {
      for (std::size_t k = 0; k < s.t.size(); ++k) {
        const double y = transform_y(s.y[k], panel.log_scale);
        if (!std::isfinite(y)) continue;
        tmin = std::min(tmin, s.t[k]);
        tmax = std::max(tmax, s.t[k]);
        ymin = std::min(ymin, y);
        ymax = std::max(ymax, y);
      }
    }
    if (!std::isfinite(tmin)) tmin = 0.0, tmax = 1.0, ymin = 0.0, ymax = 1.0;
    if (tmax <= tmin) tmax = tmin + 1.0;
    if (ymax <= ymin) {
      ymax += 0.5;
      ymin -= 0.5;
    }
    const double pad = 0.05 * (ymax - ymin);
    ymin -= pad;
    ymax += pad;
    auto px = [&](double t) { return kLeft + (t - tmin) / (tmax - tmin) * plot_w; };
    auto py = [&](double y) { return y0 + kTop + (ymax - y) / (ymax - ymin) * plot_h; };

    svg << "<text x=\"" << kLeft << "\" y=\"" << y0 + 20 << "\" font-size=\"13\">"
        << escape(panel.title) << (panel.log_scale ? " (log10)" : "") << "</text>\n";
    svg << "<rect x=\"" << kLeft << "\" y=\"" << y0 + kTop << "\" width=\"" << plot_w
        << "\" height=\"" << plot_h << "\" fill=\"none\" stroke=\"#444\"/>\n";
    for (int k = 0; k <= 4; ++k) {
      const double t = tmin + (tmax - tmin) * k / 4.0;
      const double y = ymin + (ymax - ymin) * k / 4.0;
      svg << "<text x=\"" << fmt(px(t), "%.2f") << "\" y=\"" << y0 + kPanelHeight - 14
          << "\" text-anchor=\"middle\">" << fmt(t, "%.3g") << "</text>\n";
      svg << "<text x=\"" << kLeft - 6 << "\" y=\"" << fmt(py(y) + 4, "%.2f")
          << "\" text-anchor=\"end\">" << fmt(y, "%.3g") << "</text>\n";
      svg << "<line x1=\"" << kLeft << "\" x2=\"" << kLeft + plot_w << "\" y1=\""
          << fmt(py(y), "%.2f") << "\" y2=\"" << fmt(py(y), "%.2f")
          << "\" stroke=\"#eee\"/>\n";
    }
    svg << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << y0 + kPanelHeight - 2
        << "\" text-anchor=\"middle\">t [s]</text>\n";

    for (std::size_t si = 0; si < panel.series.size(); ++si) {
      const Series& s = panel.series[si];
      const char* colour = kPalette[si % (sizeof kPalette / sizeof kPalette[0])];
      const std::size_t stride = std::max<std::size_t>(1, s.t.size() / kMaxPointsPerSeries);
      std::string points;
      auto flush = [&]() {
        if (!points.empty()) {
          svg << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.2\" points=\""
              << points << "\"/>\n";
          points.clear();
        }
      };
      for (std::size_t k = 0; k < s.t.size(); ++k) {
        const bool segment_start = k == 0 || s.j[k] != s.j[k - 1];
        const bool segment_end = k + 1 == s.t.size() || s.j[k + 1] != s.j[k];
        if (segment_start) flush();
        if (!(segment_start || segment_end || k % stride == 0)) continue;
        const double y = transform_y(s.y[k], panel.log_scale);
        if (!std::isfinite(y)) continue;
        points += fmt(px(s.t[k]), "%.2f") + "," + fmt(py(y), "%.2f") + " ";
      }
      flush();
      const double ly = y0 + kTop + 14.0 * static_cast<double>(si) + 6;
      svg << "<line x1=\"" << kWidth - kRight + 12 << "\" x2=\"" << kWidth - kRight + 32
          << "\" y1=\"" << ly << "\" y2=\"" << ly << "\" stroke=\"" << colour
          << "\" stroke-width=\"2\"/>\n";
      svg << "<text x=\"" << kWidth - kRight + 38 << "\" y=\"" << ly + 4 << "\">"
          << escape(s.label) << "</text>\n";
    }
  }
  svg << "</svg>\n";
  std::ofstream out = open_for_write(path);
  out << svg.str();
  if (!out) throw Error("write failed for " + path.string());
}

nlohmann::ordered_json report_to_json(const certify::CertificateReport& r) {
  nlohmann::ordered_json j;
  j["ok"] = r.ok;
  j["flow_lmis_ok"] = r.flow_lmis_ok;
  j["jump_contraction_ok"] = r.jump_contraction_ok;
  j["growth_ok"] = r.growth_ok;
  j["beta1"] = r.beta1;
  j["beta2"] = r.beta2;
  j["kappa1"] = r.kappa1;
  j["kappa2"] = r.kappa2;
  j["kappa_bar1"] = r.kappa_bar1;
  j["kappa_bar2"] = r.kappa_bar2;
  j["alpha1"] = r.alpha1;
  j["alpha2"] = r.alpha2;
  j["alpha_w1"] = r.alpha_w1;
  j["alpha_w2"] = r.alpha_w2;
  j["beta_tilde"] = r.beta_tilde;
  j["gamma_bar"] = r.gamma_bar;
  j["growth_factor"] = r.growth_factor;
  j["worst_nu"] = r.worst_nu;
  j["max_jump_eigenvalue"] = r.max_jump_eigenvalue;
  j["kappa2_lambda_min_sup"] = r.kappa2_lambda_min_sup;
  j["T1"] = r.T1;
  j["T2"] = r.T2;
  j["epsilon"] = r.epsilon_young;
  j["spectrum_real"] = r.spectrum_real;
  return j;
}

}  // namespace hyntp::cli
