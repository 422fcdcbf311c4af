// Copyright 2026 hyntp-lab contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "hyntp/certify.hpp"
#include "hyntp/hybrid.hpp"
#include "json.hpp"

namespace hyntp::cli {

/// Column labels e1..en, u1..un, eta1.., tau_star1.., a_hat1.., tau_hat1.., tau.
std::vector<std::string> closed_loop_labels(std::size_t n);

/// Header `t,j,<labels>` then one row per sample with 17 significant digits.
void write_csv(const hybrid::HybridSolution& sol, const std::vector<std::string>& labels,
               const std::filesystem::path& path);

/// One curve of a plot; consecutive points with different j are not joined.
struct Series {
  std::string label;
  std::vector<double> t;
  std::vector<int> j;
  std::vector<double> y;
};

struct Panel {
  std::string title;
  std::vector<Series> series;
  bool log_scale = false;
};

/// Evaluates `value` at every sample of `sol`.
Series make_series(const hybrid::HybridSolution& sol, std::string label,
                   const std::function<double(const hybrid::Sample&)>& value);

/// Stacked line plots versus t written as a standalone SVG document.
void emit_plot(const std::vector<Panel>& panels, const std::filesystem::path& path);

nlohmann::ordered_json report_to_json(const certify::CertificateReport& r);

/// Formats with 17 significant digits.
std::string format_number(double v);

}  // namespace hyntp::cli
