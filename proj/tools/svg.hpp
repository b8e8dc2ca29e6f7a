#pragma once

#include <string>
#include <vector>

namespace descent::cli {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

/// Static line chart: one polyline per series inside a framed plot area.
void write_svg(const std::string& path, const std::string& title, const std::string& x_label,
               const std::string& y_label, const std::vector<Series>& series);

}  // namespace descent::cli
