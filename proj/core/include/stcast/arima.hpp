#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace stcast {

struct ArimaOrder {
  int p = 2;  // AR lags
  int d = 1;  // differences
  int q = 1;  // MA lags
};

/// Fitted ARIMA(p,d,q): intercept plus AR/MA coefficients on the d-times
/// differenced scale. Forecasting is stateless; callers pass history.
struct ArimaModel {
  ArimaOrder order;
  double intercept = 0;
  std::vector<double> ar;  // phi, size p
  std::vector<double> ma;  // theta, size q
  double sigma2 = 0;       // residual variance from the CSS fit

  std::string dump() const;  // text key-value summary
};

/// True iff the AR polynomial 1 - phi_1 z - ... - phi_p z^p has all roots
/// outside the unit circle (checked via the reflection-coefficient
/// recursion).
bool ar_stationary(std::span<const double> phi);

/// Same root condition for the MA polynomial 1 + theta_1 z + ...
bool ma_invertible(std::span<const double> theta);

/// Conditional sum of squares of the ARMA residual recursion over z, with
/// residuals before the first usable step set to zero.
double css_objective(std::span<const double> z, double intercept,
                     std::span<const double> phi,
                     std::span<const double> theta);

/// Two-stage start values (intercept, phi..., theta...): long-AR fit, then
/// regression on lags and long-AR residuals, shrunk into the admissible
/// region if needed.
std::vector<double> hannan_rissanen_start(std::span<const double> z, int p,
                                          int q);

/// Fits by minimizing CSS with Nelder-Mead from a Hannan-Rissanen start
/// (long-AR residual regression), with seeded restarts. Non-stationary or
/// non-invertible candidates are penalized away. Requires the differenced
/// series to hold at least 10*(p+q) points.
ArimaModel fit_arima(std::span<const double> series, const ArimaOrder& order,
                     std::uint64_t seed = 0);

/// One-step-ahead mean forecast on the original scale given the full
/// observed history (teacher forcing): residuals are rebuilt from observed
/// values, the differenced forecast is integrated back d times.
double forecast_one(const ArimaModel& m, std::span<const double> history);

}  // namespace stcast
