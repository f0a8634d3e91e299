#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace cpsphere::cli {

struct Series {
  std::string label;
  std::vector<double> xs;
  std::vector<double> ys;
};

struct Chart {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  std::vector<Series> series;
};

namespace detail {

inline std::string escape_xml(const std::string &s) {
  std::string out;
  for (char c : s) {
    switch (c) {
    case '<': out += "&lt;"; break;
    case '>': out += "&gt;"; break;
    case '&': out += "&amp;"; break;
    case '"': out += "&quot;"; break;
    default: out += c;
    }
  }
  return out;
}

inline std::string fmt(double v, const char *spec = "%.4g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

} // namespace detail

/// Plain SVG line chart: frame, five ticks per axis, one polyline per series
/// and a legend. Non-finite points break the line.
inline std::string render_svg(const Chart &chart) {
  constexpr double W = 720, H = 480, left = 90, right = 190, top = 40, bottom = 60;
  const double pw = W - left - right, ph = H - top - bottom;
  static const char *colours[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                  "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

  auto tx = [&](double x) { return chart.log_x ? std::log10(x) : x; };
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto &s : chart.series)
    for (std::size_t i = 0; i < s.xs.size(); ++i) {
      if (!std::isfinite(s.ys[i]) || (chart.log_x && !(s.xs[i] > 0.0)))
        continue;
      x0 = std::min(x0, tx(s.xs[i]));
      x1 = std::max(x1, tx(s.xs[i]));
      y0 = std::min(y0, s.ys[i]);
      y1 = std::max(y1, s.ys[i]);
    }
  if (!std::isfinite(x0)) {
    x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;
  }
  if (x1 == x0)
    x1 = x0 + 1.0;
  if (y1 == y0) {
    const double pad = y0 == 0.0 ? 1.0 : 0.05 * std::abs(y0);
    y0 -= pad, y1 += pad;
  }
  const double ypad = 0.05 * (y1 - y0);
  y0 -= ypad, y1 += ypad;

  auto px = [&](double x) { return left + (tx(x) - x0) / (x1 - x0) * pw; };
  auto py = [&](double y) { return top + (y1 - y) / (y1 - y0) * ph; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << left + pw / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">"
      << detail::escape_xml(chart.title) << "</text>\n";
  svg << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\""
      << ph << "\" fill=\"none\" stroke=\"black\"/>\n";

  for (int k = 0; k <= 4; ++k) {
    const double fx = x0 + (x1 - x0) * k / 4.0;
    const double sx = left + pw * k / 4.0;
    const double label = chart.log_x ? std::pow(10.0, fx) : fx;
    svg << "<line x1=\"" << sx << "\" y1=\"" << top + ph << "\" x2=\"" << sx << "\" y2=\""
        << top + ph + 5 << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << sx << "\" y=\"" << top + ph + 18 << "\" text-anchor=\"middle\">"
        << detail::fmt(label) << "</text>\n";
    const double fy = y0 + (y1 - y0) * k / 4.0;
    const double sy = py(fy);
    svg << "<line x1=\"" << left - 5 << "\" y1=\"" << sy << "\" x2=\"" << left << "\" y2=\""
        << sy << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << left - 8 << "\" y=\"" << sy + 4 << "\" text-anchor=\"end\">"
        << detail::fmt(fy, "%.5g") << "</text>\n";
  }
  svg << "<text x=\"" << left + pw / 2 << "\" y=\"" << H - 15
      << "\" text-anchor=\"middle\">" << detail::escape_xml(chart.x_label)
      << (chart.log_x ? " (log)" : "") << "</text>\n";
  svg << "<text transform=\"translate(20," << top + ph / 2
      << ") rotate(-90)\" text-anchor=\"middle\">" << detail::escape_xml(chart.y_label)
      << "</text>\n";

  for (std::size_t s = 0; s < chart.series.size(); ++s) {
    const auto &ser = chart.series[s];
    const char *colour = colours[s % (sizeof colours / sizeof *colours)];
    std::string points;
    auto flush = [&] {
      if (!points.empty())
        svg << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\" points=\""
            << points << "\"/>\n";
      points.clear();
    };
    for (std::size_t i = 0; i < ser.xs.size(); ++i) {
      if (!std::isfinite(ser.ys[i]) || (chart.log_x && !(ser.xs[i] > 0.0))) {
        flush();
        continue;
      }
      points += detail::fmt(px(ser.xs[i]), "%.2f") + "," + detail::fmt(py(ser.ys[i]), "%.2f") + " ";
    }
    flush();
    const double ly = top + 10 + 18.0 * s;
    svg << "<line x1=\"" << left + pw + 12 << "\" y1=\"" << ly << "\" x2=\"" << left + pw + 36
        << "\" y2=\"" << ly << "\" stroke=\"" << colour << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << left + pw + 42 << "\" y=\"" << ly + 4 << "\">"
        << detail::escape_xml(ser.label) << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

inline void write_svg(const Chart &chart, const std::string &path) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw std::runtime_error("cannot open '" + path + "' for writing");
  out << render_svg(chart);
  if (!out)
    throw std::runtime_error("write to '" + path + "' failed");
}

} // namespace cpsphere::cli
