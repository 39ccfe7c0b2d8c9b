#include "stcast/data.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

namespace stcast {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path,
                                               const std::string& header) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) {
    throw ValidationError(path.string() + ": empty file");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != header) {
    throw ValidationError(path.string() + ": expected header '" + header +
                          "', got '" + line + "'");
  }
  std::vector<std::vector<std::string>> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split_fields(line);
    rows.push_back(std::move(fields));
    rows.back().emplace_back(std::to_string(lineno));  // trailing: line number
  }
  return rows;
}

double parse_number(const std::string& s, const std::string& what,
                    const std::string& where) {
  double v = 0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last) {
    throw ValidationError(where + ": bad " + what + " '" + s + "'");
  }
  return v;
}

long long parse_count(const std::string& s, const std::string& where) {
  long long v = 0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last) {
    throw ValidationError(where + ": bad count '" + s + "', expected integer");
  }
  return v;
}

/// Checks one region's month->value map for gaps and returns (start, length).
template <typename T>
std::pair<YearMonth, int> contiguous_range(const RegionId& region,
                                           const std::map<YearMonth, T>& rows,
                                           const std::string& where) {
  const YearMonth start = rows.begin()->first;
  const YearMonth end = rows.rbegin()->first;
  const int span = start.months_until(end) + 1;
  if (span != static_cast<int>(rows.size())) {
    // Find the first gap for the message.
    YearMonth expect = start;
    for (const auto& [m, _] : rows) {
      if (m != expect) {
        throw ValidationError(where + ": region '" + region +
                              "' missing month " + expect.str());
      }
      expect = expect.plus(1);
    }
  }
  return {start, span};
}

template <typename T>
void check_shared_range(const std::map<RegionId, std::map<YearMonth, T>>& data,
                        const std::string& where) {
  const auto& first = *data.begin();
  const YearMonth lo = first.second.begin()->first;
  const YearMonth hi = first.second.rbegin()->first;
  for (const auto& [region, rows] : data) {
    if (rows.begin()->first != lo || rows.rbegin()->first != hi) {
      throw ValidationError(where + ": region '" + region +
                            "' covers a different month range than '" +
                            first.first + "'");
    }
  }
}

}  // namespace

CaseTable load_cases(const std::filesystem::path& path) {
  const std::string where = path.string();
  std::map<RegionId, std::map<YearMonth, double>> data;
  for (const auto& row : read_csv(path, "region,month,cases")) {
    const std::string at = where + ":" + row.back();
    if (row.size() != 4) throw ValidationError(at + ": expected 3 fields");
    const RegionId& region = row[0];
    if (region.empty()) throw ValidationError(at + ": empty region");
    const YearMonth month = YearMonth::parse(row[1]);
    const long long count = parse_count(row[2], at);
    if (count < 0) {
      throw ValidationError(at + ": negative count for region '" + region +
                            "' at " + month.str());
    }
    auto [it, inserted] =
        data[region].emplace(month, static_cast<double>(count));
    if (!inserted) {
      throw ValidationError(at + ": duplicate entry for region '" + region +
                            "' at " + month.str());
    }
  }
  if (data.empty()) throw ValidationError(where + ": no data rows");

  CaseTable table;
  for (const auto& [region, rows] : data) {
    auto [start, span] = contiguous_range(region, rows, where);
    (void)span;
    table.start = start;
  }
  check_shared_range(data, where);
  for (const auto& [region, rows] : data) {
    table.regions.push_back(region);
    std::vector<double> series;
    series.reserve(rows.size());
    for (const auto& [_, v] : rows) series.push_back(v);
    table.counts.push_back(std::move(series));
  }
  return table;
}

ClimateTable load_climate(const std::filesystem::path& path) {
  const std::string where = path.string();
  std::map<RegionId, std::map<YearMonth, ClimateVector>> data;
  for (const auto& row :
       read_csv(path, "region,month,tmax,tmin,tmean,precip")) {
    const std::string at = where + ":" + row.back();
    if (row.size() != 7) throw ValidationError(at + ": expected 6 fields");
    const RegionId& region = row[0];
    if (region.empty()) throw ValidationError(at + ": empty region");
    const YearMonth month = YearMonth::parse(row[1]);
    ClimateVector v;
    v.tmax = parse_number(row[2], "tmax", at);
    v.tmin = parse_number(row[3], "tmin", at);
    v.tmean = parse_number(row[4], "tmean", at);
    v.precip = parse_number(row[5], "precip", at);
    if (!(v.tmin <= v.tmean && v.tmean <= v.tmax)) {
      throw ValidationError(at + ": temperatures must satisfy tmin <= tmean <= "
                            "tmax for region '" +
                            region + "' at " + month.str());
    }
    if (v.precip < 0) {
      throw ValidationError(at + ": negative precipitation for region '" +
                            region + "' at " + month.str());
    }
    auto [it, inserted] = data[region].emplace(month, v);
    if (!inserted) {
      throw ValidationError(at + ": duplicate entry for region '" + region +
                            "' at " + month.str());
    }
  }
  if (data.empty()) throw ValidationError(where + ": no data rows");

  ClimateTable table;
  for (const auto& [region, rows] : data) {
    auto [start, span] = contiguous_range(region, rows, where);
    (void)span;
    table.start = start;
  }
  check_shared_range(data, where);
  for (const auto& [region, rows] : data) {
    table.regions.push_back(region);
    std::vector<ClimateVector> series;
    series.reserve(rows.size());
    for (const auto& [_, v] : rows) series.push_back(v);
    table.records.push_back(std::move(series));
  }
  return table;
}

AdjacencyGraph load_adjacency(const std::filesystem::path& path) {
  const std::string where = path.string();
  AdjacencyGraph graph;
  for (const auto& row : read_csv(path, "region_a,region_b")) {
    const std::string at = where + ":" + row.back();
    if (row.size() == 2 || (row.size() == 3 && row[1].empty())) {
      // Isolated-node row: `A` or `A,`.
      if (row[0].empty()) throw ValidationError(at + ": empty region");
      graph.add_node(row[0]);
      continue;
    }
    if (row.size() != 3) throw ValidationError(at + ": expected 2 fields");
    if (row[0].empty() || row[1].empty()) {
      throw ValidationError(at + ": empty region");
    }
    graph.add_edge(row[0], row[1]);  // throws on self-loop
  }
  if (graph.node_count() == 0) throw ValidationError(where + ": no edges");
  return graph;
}

namespace {

/// Permutation that puts `regions` into ascending id order.
std::vector<std::size_t> sorted_order(const std::vector<RegionId>& regions) {
  std::vector<std::size_t> order(regions.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) {
              return regions[a] < regions[b];
            });
  for (std::size_t i = 1; i < order.size(); ++i) {
    if (regions[order[i - 1]] == regions[order[i]]) {
      throw ValidationError("assemble: duplicate region '" +
                            regions[order[i]] + "'");
    }
  }
  return order;
}

}  // namespace

PanelDataset assemble(const CaseTable& cases, const ClimateTable& climate,
                      const AdjacencyGraph& graph, YearMonth split) {
  {
    auto sorted = [](std::vector<RegionId> v) {
      std::sort(v.begin(), v.end());
      return v;
    };
    if (sorted(cases.regions) != sorted(climate.regions)) {
      throw ValidationError("assemble: case and climate region sets differ");
    }
  }
  if (cases.start != climate.start || cases.months() != climate.months()) {
    throw ValidationError("assemble: case and climate month ranges differ");
  }
  for (const auto& series : cases.counts) {
    if (static_cast<int>(series.size()) != cases.months()) {
      throw ValidationError("assemble: ragged case series");
    }
  }
  for (const auto& series : climate.records) {
    if (static_cast<int>(series.size()) != climate.months()) {
      throw ValidationError("assemble: ragged climate series");
    }
  }
  for (const auto& node : graph.nodes()) {
    if (std::find(cases.regions.begin(), cases.regions.end(), node) ==
        cases.regions.end()) {
      throw ValidationError("assemble: adjacency references unknown region '" +
                            node + "'");
    }
  }
  for (const auto& region : cases.regions) {
    if (!graph.has_node(region)) {
      throw ValidationError("assemble: region '" + region +
                            "' missing from the adjacency graph");
    }
  }

  const int total = cases.months();
  const int n = cases.start.months_until(split) + 1;  // months <= split
  if (n <= 0 || n >= total) {
    throw ValidationError("assemble: split " + split.str() +
                          " not strictly inside " + cases.start.str() + ".." +
                          cases.start.plus(total - 1).str());
  }

  PanelDataset ds;
  ds.start = cases.start;
  const auto case_order = sorted_order(cases.regions);
  for (std::size_t i : case_order) {
    ds.regions.push_back(cases.regions[i]);
    ds.cases.push_back(cases.counts[i]);
  }
  const auto climate_order = sorted_order(climate.regions);
  for (std::size_t i : climate_order) {
    ds.climate.push_back(climate.records[i]);
  }
  ds.graph = graph;
  ds.total_months = total;
  ds.train_months = n;
  ds.neighbor_ids.resize(ds.regions.size());
  for (std::size_t r = 0; r < ds.regions.size(); ++r) {
    for (const auto& nb : graph.neighbors(ds.regions[r])) {
      ds.neighbor_ids[r].push_back(ds.region_index(nb));
    }
    std::sort(ds.neighbor_ids[r].begin(), ds.neighbor_ids[r].end());
  }
  return ds;
}

int PanelDataset::region_index(const RegionId& r) const {
  auto it = std::lower_bound(regions.begin(), regions.end(), r);
  if (it == regions.end() || *it != r) return -1;
  return static_cast<int>(it - regions.begin());
}

ValueAccessor raw_counts(const PanelDataset& ds) {
  return [&ds](int region, int t) { return ds.cases[region][t]; };
}

NeighborVector top_neighbors(const PanelDataset& ds, int region, int t,
                             const ValueAccessor& scale) {
  if (t < 1) {
    throw ValidationError("top_neighbors: t must be >= 1 (no prior month)");
  }
  const auto& nbrs = ds.neighbor_ids[region];
  // Rank by raw count at t-1, descending; ties by ascending region id.
  std::vector<int> order(nbrs.begin(), nbrs.end());
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const double ca = ds.cases[a][t - 1];
    const double cb = ds.cases[b][t - 1];
    if (ca != cb) return ca > cb;
    return ds.regions[a] < ds.regions[b];
  });
  NeighborVector out;
  for (int i = 0; i < static_cast<int>(order.size()) && i < 3; ++i) {
    out.values[i] = scale(order[i], t - 1);
    out.sources[i] = order[i];
    ++out.count;
  }
  return out;
}

}  // namespace stcast
