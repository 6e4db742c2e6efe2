#include "harness/emit.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <dualdec/errors.hpp>

namespace dualdec::harness {

namespace {

std::ofstream open_or_throw(const std::string& path) {
  std::ofstream out(path, std::ios::binary);  // binary: no newline translation
  if (!out) throw Error("cannot open '" + path + "' for writing");
  return out;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
  auto out = open_or_throw(path);
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out << ',';
    out << header[i];
  }
  out << '\n';
  for (const auto& row : rows) {
    if (row.size() != header.size())
      throw Error("row width does not match the header in '" + path + "'");
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      out << row[i];
    }
    out << '\n';
  }
  if (!out) throw Error("failed while writing '" + path + "'");
}

void write_json(const std::string& path, const nlohmann::ordered_json& doc) {
  auto out = open_or_throw(path);
  out << doc.dump(2) << '\n';
  if (!out) throw Error("failed while writing '" + path + "'");
}

void write_svg_log_plot(const std::string& path, const std::string& title,
                        const std::string& x_label, const std::string& y_label,
                        const std::vector<PlotSeries>& series) {
  constexpr double width = 760, height = 520;
  constexpr double ml = 70, mr = 160, mt = 40, mb = 50;  // margins
  const double pw = width - ml - mr, ph = height - mt - mb;

  double x_min = std::numeric_limits<double>::infinity(), x_max = -x_min;
  double ly_min = std::numeric_limits<double>::infinity(), ly_max = -ly_min;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i)
      if (s.y[i] > 0.0) {
        x_min = std::min(x_min, s.x[i]);
        x_max = std::max(x_max, s.x[i]);
        ly_min = std::min(ly_min, std::log10(s.y[i]));
        ly_max = std::max(ly_max, std::log10(s.y[i]));
      }
  if (!(x_max > x_min)) x_max = x_min + 1.0;
  if (!(ly_max > ly_min)) ly_max = ly_min + 1.0;
  if (!std::isfinite(x_min)) {  // nothing plottable
    x_min = 0.0;
    x_max = 1.0;
    ly_min = 0.0;
    ly_max = 1.0;
  }

  const auto px = [&](double x) {
    return ml + (x - x_min) / (x_max - x_min) * pw;
  };
  const auto py = [&](double y) {
    return mt + ph - (std::log10(y) - ly_min) / (ly_max - ly_min) * ph;
  };

  static const char* colors[] = {"#1f6fb3", "#c23b22", "#2e8b57", "#8b5cb3",
                                 "#b8860b", "#3f7f7f", "#a0522d", "#555555"};
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << ' '
      << height << "\">\n";
  svg << "<rect width=\"" << width << "\" height=\"" << height
      << "\" fill=\"white\"/>\n";
  svg << "<text x=\"" << ml + pw / 2 << "\" y=\"24\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"15\">"
      << title << "</text>\n";

  // frame
  svg << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << pw
      << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"#333333\" stroke-width=\"1\"/>\n";

  // y grid lines at integer decades
  for (int d = static_cast<int>(std::ceil(ly_min));
       d <= static_cast<int>(std::floor(ly_max)); ++d) {
    const double y = mt + ph - (d - ly_min) / (ly_max - ly_min) * ph;
    svg << "<line x1=\"" << ml << "\" y1=\"" << y << "\" x2=\"" << ml + pw
        << "\" y2=\"" << y
        << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
    svg << "<text x=\"" << ml - 8 << "\" y=\"" << y + 4
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
           "font-size=\"11\">1e"
        << d << "</text>\n";
  }
  // x ticks: five evenly spaced
  for (int t = 0; t <= 4; ++t) {
    const double xv = x_min + (x_max - x_min) * t / 4.0;
    const double x = px(xv);
    svg << "<line x1=\"" << x << "\" y1=\"" << mt + ph << "\" x2=\"" << x
        << "\" y2=\"" << mt + ph + 5
        << "\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
    svg << "<text x=\"" << x << "\" y=\"" << mt + ph + 20
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"11\">"
        << format_double(std::round(xv)) << "</text>\n";
  }
  svg << "<text x=\"" << ml + pw / 2 << "\" y=\"" << height - 10
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"12\">"
      << x_label << "</text>\n";
  svg << "<text x=\"18\" y=\"" << mt + ph / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"12\" transform=\"rotate(-90 18 "
      << mt + ph / 2 << ")\">" << y_label << "</text>\n";

  for (std::size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    const char* color = colors[si % (sizeof(colors) / sizeof(colors[0]))];
    svg << "<polyline fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"1.5\" points=\"";
    bool first = true;
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!(s.y[i] > 0.0)) continue;
      if (!first) svg << ' ';
      svg << format_double(px(s.x[i])) << ',' << format_double(py(s.y[i]));
      first = false;
    }
    svg << "\"/>\n";
    const double legend_y = mt + 16 + 18 * static_cast<double>(si);
    svg << "<line x1=\"" << ml + pw + 12 << "\" y1=\"" << legend_y - 4
        << "\" x2=\"" << ml + pw + 34 << "\" y2=\"" << legend_y - 4
        << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << ml + pw + 40 << "\" y=\"" << legend_y
        << "\" font-family=\"sans-serif\" font-size=\"11\">" << s.label
        << "</text>\n";
  }
  svg << "</svg>\n";

  auto out = open_or_throw(path);
  out << svg.str();
  if (!out) throw Error("failed while writing '" + path + "'");
}

}  // namespace dualdec::harness
