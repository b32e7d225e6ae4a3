#include "sentitrade/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace sentitrade::plot {

namespace {

constexpr double kWidth = 720;
constexpr double kHeight = 400;
constexpr double kLeft = 70;
constexpr double kRight = 20;
constexpr double kTop = 40;
constexpr double kBottom = 50;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

struct Range {
  double lo = 0.0;
  double hi = 1.0;
};

Range range_of(const std::vector<double>& v, const std::vector<double>& extra) {
  Range r;
  bool any = false;
  for (const auto* src : {&v, &extra}) {
    for (double x : *src) {
      if (!std::isfinite(x)) continue;
      if (!any) {
        r.lo = r.hi = x;
        any = true;
      }
      r.lo = std::min(r.lo, x);
      r.hi = std::max(r.hi, x);
    }
  }
  if (r.hi == r.lo) {
    r.lo -= 1.0;
    r.hi += 1.0;
  }
  return r;
}

}  // namespace

std::string render_svg(const Chart& chart) {
  std::vector<double> mx, my;
  for (const auto& m : chart.markers) {
    mx.push_back(m.x);
    my.push_back(m.y);
  }
  const Range xr = range_of(chart.x, mx);
  const Range yr = range_of(chart.y, my);
  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - xr.lo) / (xr.hi - xr.lo) * pw; };
  auto py = [&](double y) { return kTop + (1.0 - (y - yr.lo) / (yr.hi - yr.lo)) * ph; };

  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) + "\" height=\"" +
       num(kHeight) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s += "<text x=\"" + num(kWidth / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" +
       escape(chart.title) + "</text>\n";
  // axes
  s += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(kTop + ph) + "\" x2=\"" + num(kLeft + pw) +
       "\" y2=\"" + num(kTop + ph) + "\" stroke=\"black\"/>\n";
  s += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(kTop) + "\" x2=\"" + num(kLeft) + "\" y2=\"" +
       num(kTop + ph) + "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double fx = xr.lo + (xr.hi - xr.lo) * i / 4.0;
    const double fy = yr.lo + (yr.hi - yr.lo) * i / 4.0;
    s += "<text x=\"" + num(px(fx)) + "\" y=\"" + num(kTop + ph + 16) +
         "\" text-anchor=\"middle\">" + tick(fx) + "</text>\n";
    s += "<text x=\"" + num(kLeft - 6) + "\" y=\"" + num(py(fy) + 4) + "\" text-anchor=\"end\">" +
         tick(fy) + "</text>\n";
  }
  s += "<text x=\"" + num(kLeft + pw / 2) + "\" y=\"" + num(kHeight - 10) +
       "\" text-anchor=\"middle\">" + escape(chart.x_label) + "</text>\n";
  s += "<text x=\"16\" y=\"" + num(kTop + ph / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
       num(kTop + ph / 2) + ")\">" + escape(chart.y_label) + "</text>\n";

  const std::size_t n = std::min(chart.x.size(), chart.y.size());
  if (n > 0) {
    s += "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < n; ++i) {
      if (i) s += ' ';
      s += num(px(chart.x[i])) + "," + num(py(chart.y[i]));
    }
    s += "\"/>\n";
  }
  for (const auto& m : chart.markers) {
    s += "<circle cx=\"" + num(px(m.x)) + "\" cy=\"" + num(py(m.y)) + "\" r=\"3\" fill=\"" +
         escape(m.color) + "\"/>\n";
  }
  s += "</svg>\n";
  return s;
}

}  // namespace sentitrade::plot
