#pragma once

// Minimal self-contained SVG output: polyline charts with axes (optional
// log10 y axis) and a cell heatmap for parameter sweeps.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "maxwell1d/errors.hpp"

namespace maxwell1d::svg {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct ChartOptions {
  std::string title;
  std::string x_label = "t";
  std::string y_label;
  bool log_y = false;
  int width = 640;
  int height = 400;
};

namespace detail {

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

inline std::string escape(const std::string& s) {
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

inline const char* palette(std::size_t i) {
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"};
  return colors[i % 6];
}

} // namespace detail

/// Non-finite points (and non-positive ones on a log axis) are skipped.
inline void line_chart(std::ostream& os, const std::vector<Series>& series,
                       const ChartOptions& opt) {
  const double ml = 70, mr = 20, mt = 30, mb = 45;
  const double pw = opt.width - ml - mr, ph = opt.height - mt - mb;
  auto ty = [&](double y) { return opt.log_y ? std::log10(y) : y; };
  auto usable = [&](double x, double y) {
    return std::isfinite(x) && std::isfinite(y) && (!opt.log_y || y > 0.0);
  };

  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : series) {
    if (s.x.size() != s.y.size()) throw InvalidArgument("series x and y differ in length");
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!usable(s.x[i], s.y[i])) continue;
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, ty(s.y[i]));
      y1 = std::max(y1, ty(s.y[i]));
    }
  }
  if (!(x1 >= x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 == x0) x1 = x0 + 1;
  if (y1 == y0) y0 -= 0.5, y1 += 0.5;
  auto px = [&](double x) { return ml + (x - x0) / (x1 - x0) * pw; };
  auto py = [&](double y) { return mt + (1.0 - (ty(y) - y0) / (y1 - y0)) * ph; };

  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << opt.width << "\" height=\""
     << opt.height << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << opt.width / 2 << "\" y=\"18\" text-anchor=\"middle\" font-size=\"13\">"
     << detail::escape(opt.title) << "</text>\n";
  os << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << pw << "\" height=\"" << ph
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double fx = x0 + (x1 - x0) * k / 4.0;
    const double fy = y0 + (y1 - y0) * k / 4.0;
    const double gx = ml + pw * k / 4.0, gy = mt + ph * (1.0 - k / 4.0);
    os << "<text x=\"" << detail::num(gx) << "\" y=\"" << detail::num(mt + ph + 15)
       << "\" text-anchor=\"middle\">" << detail::num(fx) << "</text>\n";
    os << "<text x=\"" << detail::num(ml - 5) << "\" y=\"" << detail::num(gy + 4)
       << "\" text-anchor=\"end\">" << (opt.log_y ? "1e" + detail::num(fy) : detail::num(fy))
       << "</text>\n";
  }
  os << "<text x=\"" << detail::num(ml + pw / 2) << "\" y=\"" << opt.height - 8
     << "\" text-anchor=\"middle\">" << detail::escape(opt.x_label) << "</text>\n";
  os << "<text x=\"14\" y=\"" << detail::num(mt + ph / 2) << "\" text-anchor=\"middle\" "
     << "transform=\"rotate(-90 14 " << detail::num(mt + ph / 2) << ")\">"
     << detail::escape(opt.y_label + (opt.log_y ? " (log10)" : "")) << "</text>\n";

  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    os << "<polyline fill=\"none\" stroke=\"" << detail::palette(k) << "\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!usable(s.x[i], s.y[i])) continue;
      os << detail::num(px(s.x[i])) << ',' << detail::num(py(s.y[i])) << ' ';
    }
    os << "\"/>\n";
    os << "<text x=\"" << detail::num(ml + 8) << "\" y=\"" << detail::num(mt + 14 + 13 * k)
       << "\" fill=\"" << detail::palette(k) << "\">" << detail::escape(s.label) << "</text>\n";
  }
  os << "</svg>\n";
}

struct HeatCell {
  double x;
  double y;
  double value; // NaN draws a grey cell
};

/// Cells on a lattice, coloured blue (low) to red (high).
inline void heatmap(std::ostream& os, const std::vector<HeatCell>& cells, double cell_w,
                    double cell_h, const ChartOptions& opt) {
  const double ml = 70, mr = 20, mt = 30, mb = 45;
  const double pw = opt.width - ml - mr, ph = opt.height - mt - mb;
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  double v0 = x0, v1 = -x0;
  for (const auto& c : cells) {
    x0 = std::min(x0, c.x - cell_w / 2);
    x1 = std::max(x1, c.x + cell_w / 2);
    y0 = std::min(y0, c.y - cell_h / 2);
    y1 = std::max(y1, c.y + cell_h / 2);
    if (std::isfinite(c.value)) v0 = std::min(v0, c.value), v1 = std::max(v1, c.value);
  }
  if (cells.empty()) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (!(v1 > v0)) v1 = v0 + 1;
  auto px = [&](double x) { return ml + (x - x0) / (x1 - x0) * pw; };
  auto py = [&](double y) { return mt + (1.0 - (y - y0) / (y1 - y0)) * ph; };

  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << opt.width << "\" height=\""
     << opt.height << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << opt.width / 2 << "\" y=\"18\" text-anchor=\"middle\" font-size=\"13\">"
     << detail::escape(opt.title) << "</text>\n";
  for (const auto& c : cells) {
    std::string fill = "#bbbbbb";
    if (std::isfinite(c.value)) {
      const double s = (c.value - v0) / (v1 - v0);
      char buf[16];
      std::snprintf(buf, sizeof buf, "#%02x%02x%02x", static_cast<int>(255 * s), 64,
                    static_cast<int>(255 * (1 - s)));
      fill = buf;
    }
    const double rx = px(c.x - cell_w / 2), ry = py(c.y + cell_h / 2);
    os << "<rect x=\"" << detail::num(rx) << "\" y=\"" << detail::num(ry) << "\" width=\""
       << detail::num(px(c.x + cell_w / 2) - rx) << "\" height=\""
       << detail::num(py(c.y - cell_h / 2) - ry) << "\" fill=\"" << fill << "\"/>\n";
  }
  os << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << pw << "\" height=\"" << ph
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    os << "<text x=\"" << detail::num(ml + pw * k / 4.0) << "\" y=\"" << detail::num(mt + ph + 15)
       << "\" text-anchor=\"middle\">" << detail::num(x0 + (x1 - x0) * k / 4.0) << "</text>\n";
    os << "<text x=\"" << detail::num(ml - 5) << "\" y=\"" << detail::num(mt + ph * (1 - k / 4.0) + 4)
       << "\" text-anchor=\"end\">" << detail::num(y0 + (y1 - y0) * k / 4.0) << "</text>\n";
  }
  os << "<text x=\"" << detail::num(ml + pw / 2) << "\" y=\"" << opt.height - 8
     << "\" text-anchor=\"middle\">" << detail::escape(opt.x_label) << "</text>\n";
  os << "<text x=\"14\" y=\"" << detail::num(mt + ph / 2) << "\" text-anchor=\"middle\" "
     << "transform=\"rotate(-90 14 " << detail::num(mt + ph / 2) << ")\">"
     << detail::escape(opt.y_label) << "</text>\n";
  os << "<text x=\"" << opt.width - mr << "\" y=\"18\" text-anchor=\"end\">range "
     << detail::num(v0) << " .. " << detail::num(v1) << "</text>\n";
  os << "</svg>\n";
}

} // namespace maxwell1d::svg
