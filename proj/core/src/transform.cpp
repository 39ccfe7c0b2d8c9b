#include "stcast/transform.hpp"

#include <algorithm>

namespace stcast {

DiffSeries difference(std::span<const double> series) {
  if (series.size() < 2) {
    throw ValidationError("difference: need at least 2 values");
  }
  DiffSeries out;
  out.anchor = series[0];
  out.deltas.reserve(series.size() - 1);
  for (std::size_t t = 0; t + 1 < series.size(); ++t) {
    out.deltas.push_back(series[t + 1] - series[t]);
  }
  return out;
}

std::vector<double> undifference(double anchor,
                                 std::span<const double> deltas) {
  std::vector<double> out;
  out.reserve(deltas.size() + 1);
  out.push_back(anchor);
  for (double d : deltas) out.push_back(out.back() + d);
  return out;
}

NormParams fit_normalizer(std::span<const double> values,
                          std::size_t train_len) {
  if (train_len < 2 || train_len > values.size()) {
    throw ValidationError("fit_normalizer: train_len out of range");
  }
  NormParams p;
  auto train = values.first(train_len);
  p.lo = *std::min_element(train.begin(), train.end());
  p.hi = *std::max_element(train.begin(), train.end());
  p.degenerate = (p.hi == p.lo);
  return p;
}

double normalize(double x, const NormParams& p) {
  if (p.degenerate) return 0.5;
  return (x - p.lo) / (p.hi - p.lo);
}

double denormalize(double z, const NormParams& p) {
  if (p.degenerate) return p.lo;
  return p.lo + z * (p.hi - p.lo);
}

TransformState TransformState::fit(const PanelDataset& ds) {
  TransformState ts;
  ts.regions = ds.regions;
  ts.per_region.resize(ds.regions.size());
  const int n = ds.train_months;
  for (std::size_t r = 0; r < ds.regions.size(); ++r) {
    RegionTransform& rt = ts.per_region[r];
    const auto diff = difference(ds.cases[r]);
    rt.anchor = diff.anchor;
    // n training months give n-1 training differences.
    rt.cases = fit_normalizer(diff.deltas, static_cast<std::size_t>(n - 1));
    for (int k = 0; k < 4; ++k) {
      std::vector<double> feature;
      feature.reserve(ds.climate[r].size());
      for (const auto& v : ds.climate[r]) feature.push_back(v[k]);
      rt.climate[k] = fit_normalizer(feature, static_cast<std::size_t>(n));
    }
  }
  return ts;
}

double TransformState::case_value(const PanelDataset& ds, int region,
                                  int t) const {
  return normalize(ds.cases[region][t] - ds.cases[region][t - 1],
                   per_region[region].cases);
}

std::array<double, 4> TransformState::climate_value(const PanelDataset& ds,
                                                    int region, int t) const {
  const ClimateVector& v = ds.climate[region][t];
  std::array<double, 4> out;
  for (int k = 0; k < 4; ++k) {
    out[k] = normalize(v[k], per_region[region].climate[k]);
  }
  return out;
}

ValueAccessor TransformState::case_accessor(const PanelDataset& ds) const {
  return [this, &ds](int region, int t) { return case_value(ds, region, t); };
}

}  // namespace stcast
