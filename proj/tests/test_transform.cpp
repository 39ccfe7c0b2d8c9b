#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "stcast/rng.hpp"
#include "stcast/transform.hpp"

using namespace stcast;

TEST_CASE("difference and undifference are exact inverses") {
  const std::vector<double> series{1, 3, 6, 10};
  const DiffSeries d = difference(series);
  CHECK(d.anchor == 1);
  CHECK(d.deltas == std::vector<double>{2, 3, 4});
  CHECK(undifference(d.anchor, d.deltas) == series);

  const DiffSeries flat = difference(std::vector<double>{5, 5, 5});
  CHECK(flat.anchor == 5);
  CHECK(flat.deltas == std::vector<double>{0, 0});

  CHECK_THROWS_AS(difference(std::vector<double>{1}), ValidationError);
  CHECK(undifference(7.0, std::vector<double>{}) == std::vector<double>{7.0});
  CHECK(undifference_step(10.0, -3.0) == 7.0);
}

TEST_CASE("differencing a linear ramp yields a constant") {
  std::vector<double> ramp;
  for (int i = 0; i < 40; ++i) ramp.push_back(3.0 + 1.5 * i);
  const DiffSeries d = difference(ramp);
  for (double v : d.deltas) CHECK(v == doctest::Approx(1.5).epsilon(1e-12));
}

TEST_CASE("fit_normalizer uses the training prefix only") {
  const std::vector<double> values{-4, 0, 6, 100, -50};
  const NormParams p = fit_normalizer(values, 3);
  CHECK(p.lo == -4);
  CHECK(p.hi == 6);
  CHECK_FALSE(p.degenerate);

  const NormParams flat = fit_normalizer(std::vector<double>{2, 2, 2}, 3);
  CHECK(flat.degenerate);

  CHECK_THROWS_AS(fit_normalizer(values, 9), ValidationError);
  CHECK_THROWS_AS(fit_normalizer(values, 1), ValidationError);
}

TEST_CASE("normalize maps affinely and never clips") {
  const NormParams p{-4, 6, false};
  CHECK(normalize(6, p) == 1.0);
  CHECK(normalize(-4, p) == 0.0);
  CHECK(normalize(11, p) == doctest::Approx(1.5));  // out of range is fine
  CHECK(denormalize(normalize(0.3, p), p) == doctest::Approx(0.3).epsilon(1e-12));

  const NormParams degen{5, 5, true};
  CHECK(normalize(99, degen) == 0.5);
  CHECK(denormalize(0.5, degen) == 5);
}

TEST_CASE("transform round trips hold for random series") {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 3 + static_cast<int>(rng.next_u64() % 60);
    std::vector<double> series;
    for (int i = 0; i < n; ++i) series.push_back(rng.uniform(-100, 100));
    const DiffSeries d = difference(series);
    const auto back = undifference(d.anchor, d.deltas);
    REQUIRE(back.size() == series.size());
    for (std::size_t i = 0; i < series.size(); ++i) {
      CHECK(std::fabs(back[i] - series[i]) <= 1e-9);
    }
    const NormParams p = fit_normalizer(d.deltas, d.deltas.size());
    if (!p.degenerate) {
      for (double v : d.deltas) {
        CHECK(std::fabs(denormalize(normalize(v, p), p) - v) <= 1e-12 *
                  std::max(1.0, std::fabs(v)));
      }
    }
  }
}

TEST_CASE("TransformState fits on the training window only") {
  // Test months swing far outside the training range.
  std::vector<double> counts{10, 12, 11, 14, 13, 15, 12, 14, 200, 0};
  const PanelDataset ds = test::make_panel(
      {"A", "B"}, {counts, counts}, {{"A", "B"}}, 8);
  const TransformState ts = TransformState::fit(ds);
  const NormParams& p = ts.per_region[0].cases;
  // Training diffs: 2,-1,3,-1,2,-3,2 -> lo=-3, hi=3.
  CHECK(p.lo == -3);
  CHECK(p.hi == 3);
  // Normalized training observations stay in [0,1]...
  for (int t = 1; t < ds.train_months; ++t) {
    const double z = ts.case_value(ds, 0, t);
    CHECK(z >= 0.0);
    CHECK(z <= 1.0);
  }
  // ...while test observations may leave the unit interval, unclipped.
  CHECK(ts.case_value(ds, 0, 8) > 1.0);
  CHECK(ts.case_value(ds, 0, 9) < 0.0);
}

TEST_CASE("climate features normalize per feature per region") {
  std::vector<std::vector<double>> counts(2, std::vector<double>(30, 4));
  counts[0][5] = 9;  // keep diffs non-degenerate
  counts[1][6] = 7;
  const PanelDataset ds =
      test::make_panel({"A", "B"}, counts, {{"A", "B"}}, 20);
  const TransformState ts = TransformState::fit(ds);
  for (int r = 0; r < 2; ++r) {
    for (int t = 0; t < ds.train_months; ++t) {
      const auto v = ts.climate_value(ds, r, t);
      for (double x : v) {
        CHECK(x >= -1e-12);
        CHECK(x <= 1.0 + 1e-12);
      }
    }
  }
}
