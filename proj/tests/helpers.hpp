#pragma once

#include <unistd.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "stcast/data.hpp"

namespace stcast::test {

/// Builds a valid panel from explicit per-region count series. Climate is
/// filled with a mild deterministic annual pattern.
inline PanelDataset make_panel(
    const std::vector<RegionId>& regions,
    const std::vector<std::vector<double>>& counts,
    const std::vector<std::pair<RegionId, RegionId>>& edges, int train_months,
    YearMonth start = {2013, 6}) {
  CaseTable cases;
  cases.start = start;
  cases.regions = regions;
  cases.counts = counts;

  ClimateTable climate;
  climate.start = start;
  climate.regions = regions;
  for (std::size_t r = 0; r < regions.size(); ++r) {
    std::vector<ClimateVector> series;
    for (std::size_t t = 0; t < counts[r].size(); ++t) {
      ClimateVector v;
      v.tmean = 26.0 + 2.0 * std::sin(0.5 * t + r);
      v.tmax = v.tmean + 5.0;
      v.tmin = v.tmean - 5.0;
      v.precip = 120.0 + 40.0 * std::sin(0.5 * t + 2.0 * r);
      series.push_back(v);
    }
    climate.records.push_back(std::move(series));
  }

  AdjacencyGraph graph;
  for (const auto& r : regions) graph.add_node(r);
  for (const auto& [a, b] : edges) graph.add_edge(a, b);

  return assemble(cases, climate, graph, start.plus(train_months - 1));
}

inline std::filesystem::path make_temp_dir(const std::string& tag) {
  static int counter = 0;
  const auto dir = std::filesystem::temp_directory_path() /
                   ("stcast_test_" + tag + "_" + std::to_string(counter++) +
                    "_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::filesystem::path write_file(const std::filesystem::path& dir,
                                        const std::string& name,
                                        const std::string& content) {
  const auto path = dir / name;
  std::ofstream out(path);
  out << content;
  return path;
}

}  // namespace stcast::test
