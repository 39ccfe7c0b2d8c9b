#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "stcast/eval.hpp"
#include "stcast/synth.hpp"

using namespace stcast;

TEST_CASE("gen_panel is deterministic for a fixed seed") {
  SynthConfig cfg;
  cfg.regions = 4;
  cfg.months = 40;
  cfg.train_months = 30;
  cfg.seed = 99;
  const SynthPanel a = gen_panel(cfg);
  const SynthPanel b = gen_panel(cfg);
  CHECK(a.panel.cases == b.panel.cases);
  for (int r = 0; r < 4; ++r) {
    for (int t = 0; t < 40; ++t) {
      CHECK(a.panel.climate[r][t].tmean == b.panel.climate[r][t].tmean);
      CHECK(a.panel.climate[r][t].precip == b.panel.climate[r][t].precip);
    }
  }
}

TEST_CASE("generated panels satisfy the data invariants") {
  SynthConfig cfg;
  cfg.regions = 5;
  cfg.months = 69;
  cfg.train_months = 51;
  cfg.seed = 17;
  const SynthPanel sp = gen_panel(cfg);
  for (int r = 0; r < 5; ++r) {
    for (int t = 0; t < sp.panel.total_months; ++t) {
      const double c = sp.panel.cases[r][t];
      CHECK(c >= 0.0);
      CHECK(c == std::round(c));  // integer counts
      const ClimateVector& v = sp.panel.climate[r][t];
      CHECK(v.tmin <= v.tmean);
      CHECK(v.tmean <= v.tmax);
      CHECK(v.precip >= 0.0);
    }
  }
}

TEST_CASE("ring adjacency gives every region two neighbors") {
  SynthConfig cfg;
  cfg.regions = 5;
  cfg.months = 40;
  cfg.train_months = 30;
  cfg.seed = 3;
  const SynthPanel sp = gen_panel(cfg);
  for (int r = 0; r < 5; ++r) {
    CHECK(sp.panel.neighbor_ids[r].size() == 2);
    const NeighborVector nv =
        top_neighbors(sp.panel, r, 1, raw_counts(sp.panel));
    CHECK(nv.count == 2);
    CHECK(nv.values[2] == 0.0);  // one padded entry
    CHECK(nv.sources[2] == -1);
  }
}

TEST_CASE("noiseless panels are fixed points of the dynamics up to rounding") {
  SynthConfig cfg;
  cfg.regions = 5;
  cfg.months = 69;
  cfg.train_months = 51;
  cfg.noise_sigma = 0.0;
  cfg.seed = 23;
  const SynthPanel sp = gen_panel(cfg);

  // Teacher-forced rolling forecasts with the ground-truth parameters and
  // the generator's own transform reproduce every test count to within the
  // integer rounding done at generation time.
  const auto preds =
      rolling_forecast(sp.truth.params, sp.truth.transform, sp.panel, 2);
  for (int t = sp.panel.train_months; t < sp.panel.total_months; ++t) {
    CHECK(std::fabs(preds[t - sp.panel.train_months] - sp.panel.cases[2][t]) <=
          0.5 + 1e-9);
  }
}

TEST_CASE("gen_arima_path produces calibrated noise") {
  SUBCASE("pure white noise has unit variance") {
    const auto z = gen_arima_path(0.0, {}, {}, 0, 2000, 1.0, 5);
    double mean = 0;
    for (double v : z) mean += v;
    mean /= z.size();
    double var = 0;
    for (double v : z) var += (v - mean) * (v - mean);
    var /= z.size();
    CHECK(var == doctest::Approx(1.0).epsilon(0.10));
  }
  SUBCASE("a once-integrated path differences back to white noise") {
    const auto y = gen_arima_path(0.0, {}, {}, 1, 2000, 1.0, 6);
    double var = 0;
    double mean = 0;
    std::vector<double> diffs;
    for (std::size_t t = 1; t < y.size(); ++t) diffs.push_back(y[t] - y[t - 1]);
    for (double v : diffs) mean += v;
    mean /= diffs.size();
    for (double v : diffs) var += (v - mean) * (v - mean);
    var /= diffs.size();
    CHECK(var == doctest::Approx(1.0).epsilon(0.10));
  }
  SUBCASE("unstable coefficients are rejected") {
    CHECK_THROWS_AS(gen_arima_path(0.0, std::vector<double>{1.2}, {}, 0, 100,
                                   1.0, 1),
                    ValidationError);
    CHECK_THROWS_AS(gen_arima_path(0.0, {}, std::vector<double>{-1.4}, 0, 100,
                                   1.0, 1),
                    ValidationError);
  }
  SUBCASE("same seed reproduces the path") {
    const auto a =
        gen_arima_path(0.1, std::vector<double>{0.5}, {}, 1, 100, 1.0, 9);
    const auto b =
        gen_arima_path(0.1, std::vector<double>{0.5}, {}, 1, 100, 1.0, 9);
    CHECK(a == b);
  }
}

TEST_CASE("panel CSVs round-trip through the loaders") {
  SynthConfig cfg;
  cfg.regions = 4;
  cfg.months = 40;
  cfg.train_months = 28;
  cfg.seed = 55;
  const SynthPanel sp = gen_panel(cfg);
  const auto dir = test::make_temp_dir("synth_csv");
  write_panel_csvs(sp.panel, dir);

  const CaseTable cases = load_cases(dir / "cases.csv");
  const ClimateTable climate = load_climate(dir / "climate.csv");
  const AdjacencyGraph graph = load_adjacency(dir / "adjacency.csv");
  const PanelDataset back = assemble(cases, climate, graph,
                                     cfg.start.plus(cfg.train_months - 1));
  CHECK(back.regions == sp.panel.regions);
  CHECK(back.cases == sp.panel.cases);
  for (int r = 0; r < 4; ++r) {
    for (int t = 0; t < 40; ++t) {
      CHECK(back.climate[r][t].tmax == sp.panel.climate[r][t].tmax);
      CHECK(back.climate[r][t].tmin == sp.panel.climate[r][t].tmin);
      CHECK(back.climate[r][t].tmean == sp.panel.climate[r][t].tmean);
      CHECK(back.climate[r][t].precip == sp.panel.climate[r][t].precip);
    }
  }
  CHECK(back.graph.edges() == sp.panel.graph.edges());
  std::filesystem::remove_all(dir);
}

TEST_CASE("gen_panel validates its config") {
  SynthConfig cfg;
  cfg.regions = 0;
  CHECK_THROWS_AS(gen_panel(cfg), ValidationError);
  cfg.regions = 3;
  cfg.months = 30;
  cfg.train_months = 30;
  CHECK_THROWS_AS(gen_panel(cfg), ValidationError);
  cfg.train_months = 20;  // below two seasonal cycles
  CHECK_THROWS_AS(gen_panel(cfg), ValidationError);
  cfg.train_months = 24;
  cfg.noise_sigma = -1;
  CHECK_THROWS_AS(gen_panel(cfg), ValidationError);
}
