#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "stcast/arima.hpp"
#include "stcast/data.hpp"
#include "stcast/nnet.hpp"
#include "stcast/transform.hpp"

namespace stcast {

/// Mean of |e_i|. Requires a non-empty vector.
double mae(std::span<const double> errors);

/// Root of the mean of e_i^2. Always >= mae on the same vector.
double rmse(std::span<const double> errors);

std::vector<double> abs_errors(std::span<const double> preds,
                               std::span<const double> actuals);

/// One-step-ahead predictions for every test month (t = N..T-1) on the
/// original count scale: the transformed prediction is computed with
/// teacher-forced observed inputs, denormalized, added to the previous
/// observed count and floored at zero.
std::vector<double> rolling_forecast(const ModelParams& p,
                                     const TransformState& ts,
                                     const PanelDataset& ds, int region);

/// Same protocol for the ARIMA baseline: fit once, then roll one-step
/// forecasts with observed history. Also floored at zero.
std::vector<double> rolling_forecast_arima(const ArimaModel& m,
                                           const PanelDataset& ds, int region);

/// Model column order used throughout reports.
enum ModelColumn { kBase = 0, kIntegrated = 1, kArima = 2 };
inline constexpr std::array<const char*, 3> kModelNames = {"model1", "model2",
                                                           "arima"};
inline constexpr std::array<const char*, 3> kModelLabels = {"(1)", "(2)",
                                                            "ARIMA"};

struct ReportRow {
  RegionId region;
  std::array<double, 3> rmse{};  // indexed by ModelColumn
  std::array<double, 3> mae{};
  std::array<std::vector<double>, 3> predictions;
  std::vector<double> actuals;
};

struct EvalReport {
  std::vector<ReportRow> rows;
};

/// Column indices achieving the minimum metric; more than one means a tie.
std::vector<int> metric_winners(const std::array<double, 3>& values);

/// Evaluates all three models on one region's test window.
ReportRow compare_region(const PanelDataset& ds, int region,
                         const ModelParams& base, const ModelParams& integrated,
                         const ArimaModel& arima, const TransformState& ts);

/// Aligned-text tables (RMSE then MAE), winner flagged per row.
std::string format_report_text(const EvalReport& report);

/// `region,model,rmse,mae,winner` rows, one per (region, model).
std::string format_report_csv(const EvalReport& report);

}  // namespace stcast
