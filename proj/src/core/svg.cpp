#include "core/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace lobres::svg {

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string escape(const std::string& s) {
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

std::string coord(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

}  // namespace

std::string render(const Chart& chart) {
  double x0 = std::numeric_limits<double>::infinity();
  double x1 = -x0;
  double y0 = x0;
  double y1 = -x0;
  for (const auto& l : chart.lines) {
    for (std::size_t i = 0; i < std::min(l.x.size(), l.y.size()); ++i) {
      if (!std::isfinite(l.x[i]) || !std::isfinite(l.y[i])) continue;
      x0 = std::min(x0, l.x[i]);
      x1 = std::max(x1, l.x[i]);
      y0 = std::min(y0, l.y[i]);
      y1 = std::max(y1, l.y[i]);
    }
  }
  if (!std::isfinite(x0)) {
    x0 = 0.0;
    x1 = 1.0;
    y0 = 0.0;
    y1 = 1.0;
  }
  if (x1 - x0 <= 0.0) x1 = x0 + 1.0;
  if (y1 - y0 <= 0.0) {
    y0 -= 0.5;
    y1 += 0.5;
  }
  const double pad = 0.05 * (y1 - y0);
  y0 -= pad;
  y1 += pad;

  const double left = 60.0;
  const double right = 150.0;
  const double top = 36.0;
  const double bottom = 46.0;
  const double pw = chart.width - left - right;
  const double ph = chart.height - top - bottom;
  auto px = [&](double x) { return left + (x - x0) / (x1 - x0) * pw; };
  auto py = [&](double y) { return top + (1.0 - (y - y0) / (y1 - y0)) * ph; };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << chart.width << "\" height=\"" << chart.height
    << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << coord(left) << "\" y=\"20\" font-size=\"14\">" << escape(chart.title) << "</text>\n";
  o << "<rect x=\"" << coord(left) << "\" y=\"" << coord(top) << "\" width=\"" << coord(pw) << "\" height=\""
    << coord(ph) << "\" fill=\"none\" stroke=\"#444\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = x0 + (x1 - x0) * i / 4.0;
    const double yv = y0 + (y1 - y0) * i / 4.0;
    o << "<text x=\"" << coord(px(xv)) << "\" y=\"" << coord(top + ph + 16) << "\" text-anchor=\"middle\">"
      << tick_label(xv) << "</text>\n";
    o << "<text x=\"" << coord(left - 6) << "\" y=\"" << coord(py(yv) + 4) << "\" text-anchor=\"end\">"
      << tick_label(yv) << "</text>\n";
  }
  o << "<text x=\"" << coord(left + pw / 2) << "\" y=\"" << coord(chart.height - 8.0)
    << "\" text-anchor=\"middle\">" << escape(chart.x_label) << "</text>\n";
  o << "<text transform=\"translate(14," << coord(top + ph / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
    << escape(chart.y_label) << "</text>\n";

  for (std::size_t k = 0; k < chart.lines.size(); ++k) {
    const auto& l = chart.lines[k];
    const char* color = kPalette[k % (sizeof kPalette / sizeof kPalette[0])];
    std::ostringstream pts;
    for (std::size_t i = 0; i < std::min(l.x.size(), l.y.size()); ++i) {
      if (!std::isfinite(l.x[i]) || !std::isfinite(l.y[i])) continue;
      if (chart.markers) {
        o << "<circle cx=\"" << coord(px(l.x[i])) << "\" cy=\"" << coord(py(l.y[i])) << "\" r=\"2.5\" fill=\""
          << color << "\"/>\n";
      } else {
        pts << coord(px(l.x[i])) << ',' << coord(py(l.y[i])) << ' ';
      }
    }
    if (!chart.markers) {
      o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"" << pts.str()
        << "\"/>\n";
    }
    const double ly = top + 12.0 + 14.0 * static_cast<double>(k);
    o << "<rect x=\"" << coord(left + pw + 10) << "\" y=\"" << coord(ly - 8) << "\" width=\"10\" height=\"10\" fill=\""
      << color << "\"/>\n";
    o << "<text x=\"" << coord(left + pw + 24) << "\" y=\"" << coord(ly + 1) << "\">" << escape(l.label)
      << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace lobres::svg
