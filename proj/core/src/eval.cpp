#include "stcast/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "stcast/train.hpp"

namespace stcast {

double mae(std::span<const double> errors) {
  if (errors.empty()) throw ValidationError("mae: empty error vector");
  double s = 0;
  for (double e : errors) s += std::fabs(e);
  return s / static_cast<double>(errors.size());
}

double rmse(std::span<const double> errors) {
  if (errors.empty()) throw ValidationError("rmse: empty error vector");
  double s = 0;
  for (double e : errors) s += e * e;
  return std::sqrt(s / static_cast<double>(errors.size()));
}

std::vector<double> abs_errors(std::span<const double> preds,
                               std::span<const double> actuals) {
  if (preds.size() != actuals.size()) {
    throw ValidationError("abs_errors: length mismatch");
  }
  std::vector<double> out;
  out.reserve(preds.size());
  for (std::size_t i = 0; i < preds.size(); ++i) {
    out.push_back(std::fabs(preds[i] - actuals[i]));
  }
  return out;
}

std::vector<double> rolling_forecast(const ModelParams& p,
                                     const TransformState& ts,
                                     const PanelDataset& ds, int region) {
  if (ds.test_months() <= 0) {
    throw ValidationError("rolling_forecast: empty test range");
  }
  // One teacher-forced pass over the whole history; the LSTM state at a test
  // month is identical to running it fresh from the start, so the test
  // predictions can be read off the tail.
  const auto inputs =
      teacher_forced_inputs(ds, ts, region, 2, ds.total_months - 1, p.variant);
  const auto trace = run_forward(p, inputs);
  std::vector<double> out;
  out.reserve(ds.test_months());
  for (int t = ds.train_months; t < ds.total_months; ++t) {
    const double zhat = trace.steps[t - 2].yhat;
    const double next = ds.cases[region][t - 1] +
                        denormalize(zhat, ts.per_region[region].cases);
    out.push_back(std::max(0.0, next));
  }
  return out;
}

std::vector<double> rolling_forecast_arima(const ArimaModel& m,
                                           const PanelDataset& ds,
                                           int region) {
  if (ds.test_months() <= 0) {
    throw ValidationError("rolling_forecast_arima: empty test range");
  }
  std::vector<double> out;
  out.reserve(ds.test_months());
  const auto& series = ds.cases[region];
  for (int t = ds.train_months; t < ds.total_months; ++t) {
    const double f =
        forecast_one(m, std::span<const double>(series.data(), t));
    out.push_back(std::max(0.0, f));
  }
  return out;
}

std::vector<int> metric_winners(const std::array<double, 3>& values) {
  const double best = *std::min_element(values.begin(), values.end());
  std::vector<int> out;
  for (int i = 0; i < 3; ++i) {
    if (values[i] == best) out.push_back(i);
  }
  return out;
}

ReportRow compare_region(const PanelDataset& ds, int region,
                         const ModelParams& base,
                         const ModelParams& integrated,
                         const ArimaModel& arima, const TransformState& ts) {
  ReportRow row;
  row.region = ds.regions[region];
  row.actuals.assign(ds.cases[region].begin() + ds.train_months,
                     ds.cases[region].end());
  row.predictions[kBase] = rolling_forecast(base, ts, ds, region);
  row.predictions[kIntegrated] = rolling_forecast(integrated, ts, ds, region);
  row.predictions[kArima] = rolling_forecast_arima(arima, ds, region);
  for (int m = 0; m < 3; ++m) {
    const auto errs = abs_errors(row.predictions[m], row.actuals);
    row.rmse[m] = rmse(errs);
    row.mae[m] = mae(errs);
  }
  return row;
}

namespace {

std::string fixed2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string winner_label(const std::array<double, 3>& values) {
  const auto winners = metric_winners(values);
  if (winners.size() > 1) return "tie";
  return kModelLabels[winners[0]];
}

std::string right_align(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

void format_metric_table(std::ostringstream& out, const EvalReport& report,
                         const char* title, bool use_rmse) {
  std::size_t region_w = 6;
  for (const auto& row : report.rows) {
    region_w = std::max(region_w, row.region.size());
  }
  out << title << "\n";
  out << std::string(region_w, ' ');
  for (const char* label : kModelLabels) {
    out << "  " << right_align(label, 8);
  }
  out << "  best\n";
  for (const auto& row : report.rows) {
    const auto& values = use_rmse ? row.rmse : row.mae;
    out << row.region << std::string(region_w - row.region.size(), ' ');
    for (int m = 0; m < 3; ++m) {
      out << "  " << right_align(fixed2(values[m]), 8);
    }
    out << "  " << winner_label(values) << "\n";
  }
}

}  // namespace

std::string format_report_text(const EvalReport& report) {
  std::ostringstream out;
  format_metric_table(out, report, "RMSE", true);
  out << "\n";
  format_metric_table(out, report, "MAE", false);
  return out.str();
}

std::string format_report_csv(const EvalReport& report) {
  std::ostringstream out;
  out << "region,model,rmse,mae,winner\n";
  for (const auto& row : report.rows) {
    const auto rmse_winners = metric_winners(row.rmse);
    const auto mae_winners = metric_winners(row.mae);
    for (int m = 0; m < 3; ++m) {
      std::string flags;
      if (std::find(rmse_winners.begin(), rmse_winners.end(), m) !=
          rmse_winners.end()) {
        flags += rmse_winners.size() > 1 ? "rmse(tie)" : "rmse";
      }
      if (std::find(mae_winners.begin(), mae_winners.end(), m) !=
          mae_winners.end()) {
        if (!flags.empty()) flags += "+";
        flags += mae_winners.size() > 1 ? "mae(tie)" : "mae";
      }
      out << row.region << "," << kModelNames[m] << "," << fixed2(row.rmse[m])
          << "," << fixed2(row.mae[m]) << "," << flags << "\n";
    }
  }
  return out.str();
}

}  // namespace stcast
