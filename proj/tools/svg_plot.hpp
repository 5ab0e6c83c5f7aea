#pragma once

#include <string>
#include <vector>

namespace eegrc::cli {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

/// Minimal line chart: axes, zero line, one polyline per series, legend.
std::string line_plot_svg(const std::string& title, const std::string& x_label,
                          const std::string& y_label, const std::vector<Series>& series);

}  // namespace eegrc::cli
