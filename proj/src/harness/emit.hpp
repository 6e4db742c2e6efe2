#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace dualdec::harness {

/// Shortest round-trip decimal form of a double (locale-independent), so
/// that re-reading reproduces the exact bits and reruns emit identical bytes.
std::string format_double(double v);

/// Writes rows of preformatted cells under a header line.  A row list may be
/// empty, which leaves a header-only file.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

/// Pretty-printed JSON with keys kept in insertion order.
void write_json(const std::string& path, const nlohmann::ordered_json& doc);

/// One named curve of a log-scale plot.  Nonpositive values are skipped
/// (they have no logarithm to draw).
struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

/// Hand-rolled SVG polyline chart with a logarithmic y axis.
void write_svg_log_plot(const std::string& path, const std::string& title,
                        const std::string& x_label, const std::string& y_label,
                        const std::vector<PlotSeries>& series);

}  // namespace dualdec::harness
