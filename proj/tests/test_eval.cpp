#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "helpers.hpp"
#include "stcast/eval.hpp"
#include "stcast/rng.hpp"
#include "stcast/train.hpp"

using namespace stcast;

TEST_CASE("mae and rmse formulas") {
  const std::vector<double> e{3, 4};
  CHECK(mae(e) == doctest::Approx(3.5));
  CHECK(rmse(e) == doctest::Approx(std::sqrt(12.5)));
  const std::vector<double> flat{2.5, 2.5, 2.5};
  CHECK(mae(flat) == doctest::Approx(rmse(flat)));
  CHECK_THROWS_AS(mae(std::vector<double>{}), ValidationError);
  CHECK_THROWS_AS(rmse(std::vector<double>{}), ValidationError);
}

TEST_CASE("rmse dominates mae and their gap is the error variance") {
  Rng rng(41);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 1 + static_cast<int>(rng.next_u64() % 40);
    std::vector<double> e;
    for (int i = 0; i < n; ++i) e.push_back(std::fabs(rng.uniform(-20, 20)));
    const double r = rmse(e), m = mae(e);
    CHECK(r >= m - 1e-12);
    // Population variance of |e| equals rmse^2 - mae^2.
    double var = 0;
    for (double x : e) var += (x - m) * (x - m);
    var /= n;
    CHECK(std::fabs((r * r - m * m) - var) <= 1e-9 * std::max(1.0, var));
  }
}

TEST_CASE("metrics are permutation invariant") {
  std::vector<double> e{5, 1, 9, 2, 2, 7};
  const double r = rmse(e), m = mae(e);
  std::sort(e.begin(), e.end());
  CHECK(rmse(e) == doctest::Approx(r));
  CHECK(mae(e) == doctest::Approx(m));
}

TEST_CASE("a zero-difference model forecasts the previous count") {
  std::vector<std::vector<double>> counts;
  for (int r = 0; r < 2; ++r) {
    std::vector<double> s;
    for (int t = 0; t < 30; ++t) {
      s.push_back(50 + 10 * ((t * (r + 3)) % 5) - 2 * (t % 3));
    }
    counts.push_back(s);
  }
  const PanelDataset ds =
      test::make_panel({"A", "B"}, counts, {{"A", "B"}}, 24);
  const TransformState ts = TransformState::fit(ds);

  // All parameters zero except a bias equal to normalize(0): the model then
  // predicts "no change" every month.
  ModelParams p = ModelParams::zeros(ModelVariant::base, 4, 0);
  p.bias = normalize(0.0, ts.per_region[0].cases);
  REQUIRE(p.bias > 0.0);  // ReLU must not clip it
  const auto preds = rolling_forecast(p, ts, ds, 0);
  REQUIRE(preds.size() == static_cast<std::size_t>(ds.test_months()));
  for (int t = ds.train_months; t < ds.total_months; ++t) {
    CHECK(preds[t - ds.train_months] ==
          doctest::Approx(ds.cases[0][t - 1]).epsilon(1e-9));
  }
}

TEST_CASE("rolling_forecast requires a non-empty test range") {
  std::vector<std::vector<double>> counts(
      2, std::vector<double>{1, 5, 2, 8, 3, 9});
  PanelDataset ds = test::make_panel({"A", "B"}, counts, {{"A", "B"}}, 4);
  const TransformState ts = TransformState::fit(ds);
  const ModelParams p = ModelParams::zeros(ModelVariant::base, 4, 0);
  ds.train_months = ds.total_months;  // force an empty test window
  CHECK_THROWS_AS(rolling_forecast(p, ts, ds, 0), ValidationError);
}

TEST_CASE("report formatter renders winners per metric") {
  EvalReport report;
  ReportRow matara;
  matara.region = "Matara";
  matara.rmse = {11.38, 11.36, 11.92};
  matara.mae = {9.33, 8.62, 9.54};
  report.rows.push_back(matara);
  ReportRow kurunegala;
  kurunegala.region = "Kurunegala";
  kurunegala.rmse = {14.70, 10.08, 10.35};
  kurunegala.mae = {17.50, 16.80, 17.50};
  report.rows.push_back(kurunegala);

  const std::string text = format_report_text(report);
  // Normalize runs of spaces to single separators for matching.
  std::string flat;
  bool in_space = false;
  for (char c : text) {
    if (c == ' ') {
      if (!in_space) flat += ' ';
      in_space = true;
    } else {
      flat += c;
      in_space = false;
    }
  }
  CHECK(flat.find("Matara 11.38 11.36 11.92 (2)") != std::string::npos);
  CHECK(flat.find("Kurunegala 17.50 16.80 17.50 (2)") != std::string::npos);

  const std::string csv = format_report_csv(report);
  CHECK(csv.find("region,model,rmse,mae,winner") == 0);
  CHECK(csv.find("Matara,model2,11.36,8.62,rmse+mae") != std::string::npos);
  CHECK(csv.find("Kurunegala,model2,10.08,16.80,rmse+mae") !=
        std::string::npos);
}

TEST_CASE("ties are flagged") {
  const std::array<double, 3> all_equal{3.0, 3.0, 3.0};
  CHECK(metric_winners(all_equal).size() == 3);
  EvalReport report;
  ReportRow row;
  row.region = "X";
  row.rmse = {3.0, 3.0, 3.0};
  row.mae = {1.0, 2.0, 3.0};
  report.rows.push_back(row);
  const std::string text = format_report_text(report);
  CHECK(text.find("tie") != std::string::npos);
  const std::string csv = format_report_csv(report);
  CHECK(csv.find("rmse(tie)") != std::string::npos);
}
