#pragma once

#include <string>
#include <vector>

namespace lobres::svg {

struct Line {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct Chart {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Line> lines;
  bool markers = false;  // draw points instead of polylines
  int width = 640;
  int height = 400;
};

/// Standalone SVG document. Non-finite points are skipped.
std::string render(const Chart& chart);

}  // namespace lobres::svg
