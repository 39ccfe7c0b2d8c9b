#pragma once

#include <array>
#include <span>
#include <vector>

#include "stcast/data.hpp"
#include "stcast/types.hpp"

namespace stcast {

/// First-order differences plus the anchor needed to invert them.
struct DiffSeries {
  double anchor = 0;           // first raw value
  std::vector<double> deltas;  // deltas[t] = raw[t+1] - raw[t]
};

/// Min-max range of the training portion of a series. Test-period values may
/// map outside [0, 1]; they are never clipped.
struct NormParams {
  double lo = 0;
  double hi = 0;
  bool degenerate = false;  // hi == lo on the training window
};

DiffSeries difference(std::span<const double> series);

std::vector<double> undifference(double anchor, std::span<const double> deltas);

/// One-step inversion: the raw value that follows `prev` given its delta.
inline double undifference_step(double prev, double delta) {
  return prev + delta;
}

/// Min/max over values[0..train_len) only. train_len must be >= 2 and within
/// the series.
NormParams fit_normalizer(std::span<const double> values, std::size_t train_len);

/// (x - lo) / (hi - lo). A degenerate window maps everything to 0.5.
double normalize(double x, const NormParams& p);

/// Exact inverse of normalize; a degenerate window inverts to lo.
double denormalize(double z, const NormParams& p);

/// Fitted transform for one region: differencing anchor and min-max ranges
/// for the differenced cases and each climate feature.
struct RegionTransform {
  double anchor = 0;
  NormParams cases;
  std::array<NormParams, 4> climate;
};

/// Per-region transform parameters, fitted exclusively on months t < N.
struct TransformState {
  std::vector<RegionId> regions;
  std::vector<RegionTransform> per_region;

  static TransformState fit(const PanelDataset& ds);

  /// Transformed case observation for month t (t >= 1): the normalized
  /// difference cases[t] - cases[t-1].
  double case_value(const PanelDataset& ds, int region, int t) const;

  /// Normalized climate features for month t.
  std::array<double, 4> climate_value(const PanelDataset& ds, int region,
                                      int t) const;

  /// Accessor over transformed case observations (valid for t >= 1).
  ValueAccessor case_accessor(const PanelDataset& ds) const;
};

}  // namespace stcast
