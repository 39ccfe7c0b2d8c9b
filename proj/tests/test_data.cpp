#include <doctest.h>

#include <algorithm>
#include <set>

#include "helpers.hpp"
#include "stcast/data.hpp"
#include "stcast/rng.hpp"

using namespace stcast;

TEST_CASE("YearMonth parses and formats strictly") {
  const YearMonth m = YearMonth::parse("2013-03");
  CHECK(m.year == 2013);
  CHECK(m.month == 3);
  CHECK(m.month_id() == 2);
  CHECK(m.str() == "2013-03");
  CHECK(m.plus(10).str() == "2014-01");
  CHECK(m.months_until(YearMonth::parse("2017-08")) == 53);
  CHECK_THROWS_AS(YearMonth::parse("2013-3"), ValidationError);
  CHECK_THROWS_AS(YearMonth::parse("2013/03"), ValidationError);
  CHECK_THROWS_AS(YearMonth::parse("2013-13"), ValidationError);
  CHECK_THROWS_AS(YearMonth::parse("201303"), ValidationError);
}

TEST_CASE("load_cases reads a contiguous panel") {
  const auto dir = test::make_temp_dir("cases");
  const auto path = test::write_file(dir, "cases.csv",
                                     "region,month,cases\n"
                                     "Matara,2013-03,10\n"
                                     "Matara,2013-04,12\n"
                                     "Matara,2013-05,9\n"
                                     "Galle,2013-03,4\n"
                                     "Galle,2013-04,0\n"
                                     "Galle,2013-05,7\n");
  const CaseTable t = load_cases(path);
  CHECK(t.regions == std::vector<RegionId>{"Galle", "Matara"});
  CHECK(t.months() == 3);
  CHECK(t.start.str() == "2013-03");
  CHECK(t.counts[1] == std::vector<double>{10, 12, 9});
}

TEST_CASE("load_cases rejects bad files") {
  const auto dir = test::make_temp_dir("cases_bad");
  SUBCASE("gap in months") {
    const auto p = test::write_file(dir, "gap.csv",
                                    "region,month,cases\n"
                                    "Matara,2013-03,10\n"
                                    "Matara,2013-05,9\n");
    CHECK_THROWS_WITH_AS(load_cases(p), doctest::Contains("missing month"),
                         ValidationError);
  }
  SUBCASE("negative count") {
    const auto p = test::write_file(dir, "neg.csv",
                                    "region,month,cases\n"
                                    "Matara,2013-03,-2\n");
    CHECK_THROWS_WITH_AS(load_cases(p), doctest::Contains("negative"),
                         ValidationError);
  }
  SUBCASE("duplicate row") {
    const auto p = test::write_file(dir, "dup.csv",
                                    "region,month,cases\n"
                                    "Matara,2013-03,1\n"
                                    "Matara,2013-03,2\n");
    CHECK_THROWS_WITH_AS(load_cases(p), doctest::Contains("duplicate"),
                         ValidationError);
  }
  SUBCASE("inconsistent ranges") {
    const auto p = test::write_file(dir, "ranges.csv",
                                    "region,month,cases\n"
                                    "A,2013-03,1\n"
                                    "A,2013-04,1\n"
                                    "B,2013-04,1\n"
                                    "B,2013-05,1\n");
    CHECK_THROWS_AS(load_cases(p), ValidationError);
  }
  SUBCASE("fractional count") {
    const auto p = test::write_file(dir, "frac.csv",
                                    "region,month,cases\n"
                                    "A,2013-03,1.5\n");
    CHECK_THROWS_AS(load_cases(p), ValidationError);
  }
  SUBCASE("missing file") {
    CHECK_THROWS_AS(load_cases(dir / "absent.csv"), IoError);
  }
}

TEST_CASE("load_climate validates physical invariants") {
  const auto dir = test::make_temp_dir("climate");
  SUBCASE("happy path") {
    const auto p = test::write_file(
        dir, "ok.csv",
        "region,month,tmax,tmin,tmean,precip\n"
        "Kurunegala,2013-03,33.1,22.4,27.2,110.5\n");
    const ClimateTable t = load_climate(p);
    CHECK(t.records[0][0].tmax == doctest::Approx(33.1));
    CHECK(t.records[0][0].tmin == doctest::Approx(22.4));
    CHECK(t.records[0][0].tmean == doctest::Approx(27.2));
    CHECK(t.records[0][0].precip == doctest::Approx(110.5));
  }
  SUBCASE("tmin above tmax") {
    const auto p = test::write_file(
        dir, "order.csv",
        "region,month,tmax,tmin,tmean,precip\n"
        "A,2013-03,25,30,27,10\n");
    CHECK_THROWS_AS(load_climate(p), ValidationError);
  }
  SUBCASE("negative precipitation") {
    const auto p = test::write_file(
        dir, "precip.csv",
        "region,month,tmax,tmin,tmean,precip\n"
        "A,2013-03,30,20,25,-1\n");
    CHECK_THROWS_AS(load_climate(p), ValidationError);
  }
}

TEST_CASE("load_adjacency builds a symmetric graph") {
  const auto dir = test::make_temp_dir("adj");
  SUBCASE("edges merge symmetrically") {
    const auto p = test::write_file(dir, "g.csv",
                                    "region_a,region_b\n"
                                    "A,B\n"
                                    "B,C\n"
                                    "B,A\n");
    const AdjacencyGraph g = load_adjacency(p);
    CHECK(g.neighbors("B") == std::vector<RegionId>{"A", "C"});
    CHECK(g.edges().size() == 2);
  }
  SUBCASE("self loop rejected") {
    const auto p = test::write_file(dir, "loop.csv",
                                    "region_a,region_b\nA,A\n");
    CHECK_THROWS_WITH_AS(load_adjacency(p), doctest::Contains("self-loop"),
                         ValidationError);
  }
  SUBCASE("isolated node row") {
    const auto p = test::write_file(dir, "iso.csv",
                                    "region_a,region_b\nA,B\nC,\n");
    const AdjacencyGraph g = load_adjacency(p);
    CHECK(g.has_node("C"));
    CHECK(g.neighbors("C").empty());
  }
}

TEST_CASE("assemble splits the panel at the given month") {
  // 69 months from 2013-06; split at 2017-08 leaves 51 train + 18 test.
  std::vector<std::vector<double>> counts(2, std::vector<double>(69, 5.0));
  const PanelDataset ds =
      test::make_panel({"A", "B"}, counts, {{"A", "B"}}, 51);
  CHECK(ds.train_months == 51);
  CHECK(ds.test_months() == 18);
  CHECK(ds.month(50).str() == "2017-08");
  CHECK(ds.month_id(0) == 5);       // June
  CHECK(ds.month_id(12) == 5);      // periodic
}

TEST_CASE("assemble rejects bad inputs") {
  std::vector<std::vector<double>> counts(2, std::vector<double>(10, 1.0));
  SUBCASE("split at the last month leaves no test data") {
    CHECK_THROWS_AS(test::make_panel({"A", "B"}, counts, {{"A", "B"}}, 10),
                    ValidationError);
  }
  SUBCASE("graph missing a dataset region") {
    CaseTable cases{{2013, 6}, {"A", "B"}, counts};
    ClimateTable climate;
    climate.start = {2013, 6};
    climate.regions = {"A", "B"};
    climate.records.assign(2, std::vector<ClimateVector>(10));
    for (auto& s : climate.records) {
      for (auto& v : s) v = ClimateVector{30, 20, 25, 50};
    }
    AdjacencyGraph graph;
    graph.add_node("A");  // B missing
    CHECK_THROWS_WITH_AS(
        assemble(cases, climate, graph, YearMonth{2013, 12}),
        doctest::Contains("missing from the adjacency graph"),
        ValidationError);
  }
  SUBCASE("graph with unknown region") {
    CaseTable cases{{2013, 6}, {"A", "B"}, counts};
    ClimateTable climate;
    climate.start = {2013, 6};
    climate.regions = {"A", "B"};
    climate.records.assign(2, std::vector<ClimateVector>(10));
    for (auto& s : climate.records) {
      for (auto& v : s) v = ClimateVector{30, 20, 25, 50};
    }
    AdjacencyGraph graph;
    graph.add_node("A");
    graph.add_node("B");
    graph.add_edge("A", "Z");
    CHECK_THROWS_WITH_AS(
        assemble(cases, climate, graph, YearMonth{2013, 12}),
        doctest::Contains("unknown region"), ValidationError);
  }
}

TEST_CASE("top_neighbors ranks by raw counts with id tie-break") {
  // Counts at t-1 = month 0: A:12 B:30 C:7 D:30; X is the target.
  const std::vector<RegionId> regions{"A", "B", "C", "D", "X"};
  std::vector<std::vector<double>> counts{
      {12, 1}, {30, 1}, {7, 1}, {30, 1}, {5, 1}};
  const PanelDataset ds = test::make_panel(
      regions, counts,
      {{"X", "A"}, {"X", "B"}, {"X", "C"}, {"X", "D"}}, 1);
  const int x = ds.region_index("X");
  const NeighborVector nv = top_neighbors(ds, x, 1, raw_counts(ds));
  CHECK(nv.count == 3);
  CHECK(ds.regions[nv.sources[0]] == "B");  // 30, id before D
  CHECK(ds.regions[nv.sources[1]] == "D");  // 30
  CHECK(ds.regions[nv.sources[2]] == "A");  // 12
  CHECK(nv.values[0] == 30);
  CHECK(nv.values[1] == 30);
  CHECK(nv.values[2] == 12);
}

TEST_CASE("top_neighbors pads with exact zeros") {
  std::vector<std::vector<double>> counts{{5, 6}, {9, 2}, {3, 3}};
  SUBCASE("one neighbor") {
    const PanelDataset ds =
        test::make_panel({"A", "B", "C"}, counts, {{"A", "B"}, {"B", "C"}}, 1);
    const NeighborVector nv =
        top_neighbors(ds, ds.region_index("A"), 1, raw_counts(ds));
    CHECK(nv.count == 1);
    CHECK(nv.values == std::array<double, 3>{9, 0, 0});
    CHECK(nv.sources[1] == -1);
    CHECK(nv.sources[2] == -1);
  }
  SUBCASE("zero neighbors") {
    const PanelDataset ds =
        test::make_panel({"A", "B", "C"}, counts, {{"B", "C"}}, 1);
    const NeighborVector nv =
        top_neighbors(ds, ds.region_index("A"), 1, raw_counts(ds));
    CHECK(nv.count == 0);
    CHECK(nv.values == std::array<double, 3>{0, 0, 0});
  }
  SUBCASE("t = 0 has no prior month") {
    const PanelDataset ds =
        test::make_panel({"A", "B", "C"}, counts, {{"A", "B"}}, 1);
    CHECK_THROWS_AS(top_neighbors(ds, 0, 0, raw_counts(ds)), ValidationError);
  }
}

namespace {

/// Independent oracle: among all neighbor subsets of size min(3,|I|), take
/// the one with the largest raw-count total, breaking ties by the
/// lexicographically smallest sorted id list, then order members by
/// (count desc, id asc).
std::vector<int> oracle_top3(const PanelDataset& ds, int region, int t) {
  const auto& nbrs = ds.neighbor_ids[region];
  const int k = std::min<int>(3, static_cast<int>(nbrs.size()));
  std::vector<int> best;
  double best_sum = -1;
  std::vector<int> pick(k);
  auto consider = [&](const std::vector<int>& subset) {
    double sum = 0;
    for (int r : subset) sum += ds.cases[r][t - 1];
    std::vector<int> sorted_ids = subset;
    std::sort(sorted_ids.begin(), sorted_ids.end(), [&](int a, int b) {
      return ds.regions[a] < ds.regions[b];
    });
    if (sum > best_sum ||
        (sum == best_sum && [&] {
          std::vector<int> cur = best;
          std::sort(cur.begin(), cur.end(), [&](int a, int b) {
            return ds.regions[a] < ds.regions[b];
          });
          for (std::size_t i = 0; i < cur.size(); ++i) {
            if (ds.regions[sorted_ids[i]] != ds.regions[cur[i]]) {
              return ds.regions[sorted_ids[i]] < ds.regions[cur[i]];
            }
          }
          return false;
        }())) {
      best_sum = sum;
      best = subset;
    }
  };
  std::function<void(std::size_t, int)> rec = [&](std::size_t from,
                                                  int chosen) {
    if (chosen == k) {
      consider(std::vector<int>(pick.begin(), pick.begin() + k));
      return;
    }
    for (std::size_t i = from; i < nbrs.size(); ++i) {
      pick[chosen] = nbrs[i];
      rec(i + 1, chosen + 1);
    }
  };
  if (k > 0) rec(0, 0);
  std::sort(best.begin(), best.end(), [&](int a, int b) {
    if (ds.cases[a][t - 1] != ds.cases[b][t - 1]) {
      return ds.cases[a][t - 1] > ds.cases[b][t - 1];
    }
    return ds.regions[a] < ds.regions[b];
  });
  return best;
}

}  // namespace

TEST_CASE("top_neighbors matches the brute-force subset oracle") {
  Rng rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 5 + static_cast<int>(rng.next_u64() % 3);  // 5..7 regions
    std::vector<RegionId> names;
    for (int i = 0; i < n; ++i) names.push_back(std::string(1, 'A' + i));
    std::vector<std::vector<double>> counts(n);
    for (auto& s : counts) {
      s = {static_cast<double>(rng.next_u64() % 6), 1.0};  // ties likely
    }
    std::vector<std::pair<RegionId, RegionId>> edges;
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        if (rng.uniform() < 0.5) edges.emplace_back(names[i], names[j]);
      }
    }
    const PanelDataset ds = test::make_panel(names, counts, edges, 1);
    for (int r = 0; r < n; ++r) {
      const NeighborVector nv = top_neighbors(ds, r, 1, raw_counts(ds));
      const std::vector<int> expect = oracle_top3(ds, r, 1);
      REQUIRE(nv.count == static_cast<int>(expect.size()));
      for (int i = 0; i < nv.count; ++i) {
        CHECK(nv.sources[i] == expect[i]);
      }
      for (int i = nv.count; i < 3; ++i) {
        CHECK(nv.values[i] == 0.0);
        CHECK(nv.sources[i] == -1);
      }
    }
  }
}

TEST_CASE("ranking ignores the emitted value scale") {
  std::vector<std::vector<double>> counts{
      {12, 1}, {30, 1}, {7, 1}, {5, 1}};
  const PanelDataset ds = test::make_panel(
      {"A", "B", "C", "X"}, counts,
      {{"X", "A"}, {"X", "B"}, {"X", "C"}}, 1);
  const int x = ds.region_index("X");
  const auto base = top_neighbors(ds, x, 1, raw_counts(ds));
  // Scaling every emitted value must not change the sources.
  const auto scaled = top_neighbors(ds, x, 1, [&](int r, int t) {
    return -17.5 * ds.cases[r][t];
  });
  CHECK(base.sources == scaled.sources);
  for (int i = 0; i < 3; ++i) {
    CHECK(scaled.values[i] == doctest::Approx(-17.5 * base.values[i]));
  }
}

TEST_CASE("assemble is deterministic with sorted region order") {
  std::vector<std::vector<double>> counts(3, std::vector<double>(6, 2.0));
  counts[1][3] = 9;  // belongs to "A" in the unsorted input below
  const auto a = test::make_panel({"C", "A", "B"},
                                  {counts[0], counts[1], counts[2]},
                                  {{"A", "B"}}, 4);
  CHECK(a.regions == std::vector<RegionId>{"A", "B", "C"});
  CHECK(a.cases[0][3] == 9);  // series moved with its region
  const auto b = test::make_panel({"C", "A", "B"},
                                  {counts[0], counts[1], counts[2]},
                                  {{"A", "B"}}, 4);
  CHECK(a.cases == b.cases);
  CHECK(a.regions == b.regions);
}
