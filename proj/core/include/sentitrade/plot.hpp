#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sentitrade::plot {

struct Marker {
  double x = 0.0;
  double y = 0.0;
  std::string color;  // any SVG color
};

struct Chart {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<Marker> markers;
};

/// Single-series line chart with labelled axes and optional point markers.
/// Output depends only on the inputs (fixed number formatting).
std::string render_svg(const Chart& chart);

}  // namespace sentitrade::plot
