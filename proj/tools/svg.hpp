#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace stcast::cli {

struct SvgSeries {
  std::string name;
  std::vector<double> values;
  std::string color;
  bool dashed = false;
};

/// Minimal dependency-free SVG line chart: one polyline per series, y axis
/// from the data range, a dashed vertical rule at split_index (between the
/// training and test portions), and a legend.
void write_line_chart(const std::filesystem::path& path,
                      const std::string& title,
                      const std::vector<std::string>& x_labels,
                      const std::vector<SvgSeries>& series, int split_index);

}  // namespace stcast::cli
