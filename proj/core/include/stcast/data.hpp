#pragma once

#include <array>
#include <filesystem>
#include <functional>
#include <vector>

#include "stcast/graph.hpp"
#include "stcast/types.hpp"

namespace stcast {

/// Monthly case counts per region, aligned to a shared month range.
/// Regions are sorted by id; counts[r][t] is region r's count at month t.
struct CaseTable {
  YearMonth start;
  std::vector<RegionId> regions;
  std::vector<std::vector<double>> counts;

  int months() const {
    return regions.empty() ? 0 : static_cast<int>(counts[0].size());
  }
};

/// Monthly climate records per region, same layout as CaseTable.
struct ClimateTable {
  YearMonth start;
  std::vector<RegionId> regions;
  std::vector<std::vector<ClimateVector>> records;

  int months() const {
    return regions.empty() ? 0 : static_cast<int>(records[0].size());
  }
};

/// The assembled panel: counts, climate and adjacency for every region over
/// T months, with the first N months marked as the training window.
/// Immutable after assembly; safe to share across threads.
struct PanelDataset {
  YearMonth start;
  std::vector<RegionId> regions;  // sorted by id
  std::vector<std::vector<double>> cases;
  std::vector<std::vector<ClimateVector>> climate;
  AdjacencyGraph graph;
  std::vector<std::vector<int>> neighbor_ids;  // per region, sorted indices
  int total_months = 0;  // T
  int train_months = 0;  // N, 0 < N < T

  int region_index(const RegionId& r) const;
  int month_id(int t) const { return (start.month_id() + t) % 12; }
  YearMonth month(int t) const { return start.plus(t); }
  int test_months() const { return total_months - train_months; }
};

/// Reads `region,month,cases`. Months must be contiguous per region and the
/// same range for every region; counts are non-negative integers.
CaseTable load_cases(const std::filesystem::path& path);

/// Reads `region,month,tmax,tmin,tmean,precip` with tmin <= tmean <= tmax
/// and precip >= 0, same contiguity rules as load_cases.
ClimateTable load_climate(const std::filesystem::path& path);

/// Reads `region_a,region_b`, one undirected edge per row. A row with an
/// empty second field declares an isolated node.
AdjacencyGraph load_adjacency(const std::filesystem::path& path);

/// Joins the three inputs and splits at `split` (last training month,
/// inclusive). All inputs must cover identical regions and month ranges, and
/// the graph's node set must equal the region set.
PanelDataset assemble(const CaseTable& cases, const ClimateTable& climate,
                      const AdjacencyGraph& graph, YearMonth split);

/// Up to three neighbor observations, padded with exact zeros.
struct NeighborVector {
  std::array<double, 3> values{};    // padding entries are 0.0
  std::array<int, 3> sources{-1, -1, -1};  // region indices, -1 = padding
  int count = 0;                     // non-padding entries
};

/// Reads a value for (region index, month index).
using ValueAccessor = std::function<double(int region, int t)>;

/// Accessor over raw counts.
ValueAccessor raw_counts(const PanelDataset& ds);

/// The three adjacent regions with the highest raw counts at t-1, descending,
/// ties broken by ascending region id. Emitted values come from `scale`
/// evaluated at t-1; ranking always uses raw counts. Requires t >= 1.
NeighborVector top_neighbors(const PanelDataset& ds, int region, int t,
                             const ValueAccessor& scale);

}  // namespace stcast
