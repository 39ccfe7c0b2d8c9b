#include "stcast/arima.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "stcast/optim.hpp"
#include "stcast/rng.hpp"
#include "stcast/types.hpp"

namespace stcast {

namespace {

/// Reflection-coefficient (inverse Levinson) recursion. Returns how far the
/// coefficients of 1 - a_1 z - ... - a_p z^p are from having every
/// reflection coefficient inside (-limit, limit): 0 means valid, positive is
/// the total excess. limit = 1 is the exact all-roots-outside-the-unit-circle
/// condition; a slightly smaller limit keeps fits away from the boundary.
double unit_circle_excess(std::span<const double> a_in, double limit = 1.0) {
  std::vector<double> a(a_in.begin(), a_in.end());
  double excess = 0;
  for (int k = static_cast<int>(a.size()); k >= 1; --k) {
    const double r = a[k - 1];
    if (!std::isfinite(r)) return 1e6;
    if (std::fabs(r) >= limit) excess += std::fabs(r) - limit + 1e-9;
    if (std::fabs(r) >= 1.0) {
      // Cannot continue the recursion past a unit root; report what we have.
      return excess;
    }
    if (k == 1) break;
    std::vector<double> next(k - 1);
    const double denom = 1.0 - r * r;
    for (int j = 0; j < k - 1; ++j) {
      next[j] = (a[j] + r * a[k - 2 - j]) / denom;
    }
    a = std::move(next);
  }
  return excess;
}

std::vector<double> negate(std::span<const double> v) {
  std::vector<double> out(v.begin(), v.end());
  for (double& x : out) x = -x;
  return out;
}

/// Dense OLS via normal equations with partial-pivot elimination.
/// rows: observations of (regressors..., target).
std::vector<double> least_squares(const std::vector<std::vector<double>>& x,
                                  const std::vector<double>& y) {
  const int n = static_cast<int>(x.size());
  const int k = static_cast<int>(x[0].size());
  std::vector<std::vector<double>> ata(k, std::vector<double>(k + 1, 0.0));
  for (int r = 0; r < n; ++r) {
    for (int i = 0; i < k; ++i) {
      for (int j = 0; j < k; ++j) ata[i][j] += x[r][i] * x[r][j];
      ata[i][k] += x[r][i] * y[r];
    }
  }
  for (int col = 0; col < k; ++col) {
    int pivot = col;
    for (int r = col + 1; r < k; ++r) {
      if (std::fabs(ata[r][col]) > std::fabs(ata[pivot][col])) pivot = r;
    }
    std::swap(ata[col], ata[pivot]);
    if (std::fabs(ata[col][col]) < 1e-12) {
      ata[col][col] = 1e-12;  // rank-deficient: fall back to tiny ridge
    }
    for (int r = 0; r < k; ++r) {
      if (r == col) continue;
      const double factor = ata[r][col] / ata[col][col];
      for (int c = col; c <= k; ++c) ata[r][c] -= factor * ata[col][c];
    }
  }
  std::vector<double> beta(k);
  for (int i = 0; i < k; ++i) beta[i] = ata[i][k] / ata[i][i];
  return beta;
}

std::vector<double> diff_once(std::span<const double> s) {
  std::vector<double> out;
  out.reserve(s.size() - 1);
  for (std::size_t t = 0; t + 1 < s.size(); ++t) out.push_back(s[t + 1] - s[t]);
  return out;
}

}  // namespace

std::vector<double> hannan_rissanen_start(std::span<const double> z, int p,
                                          int q) {
  const int n = static_cast<int>(z.size());
  int m = std::max(p + q, static_cast<int>(std::lround(10.0 * std::log10(n))));
  m = std::min(m, n / 4);
  m = std::max(m, 1);

  std::vector<std::vector<double>> x1;
  std::vector<double> y1;
  for (int t = m; t < n; ++t) {
    std::vector<double> row(m + 1, 1.0);
    for (int i = 1; i <= m; ++i) row[i] = z[t - i];
    x1.push_back(std::move(row));
    y1.push_back(z[t]);
  }
  const auto long_ar = least_squares(x1, y1);
  std::vector<double> resid(n, 0.0);
  for (int t = m; t < n; ++t) {
    double fit = long_ar[0];
    for (int i = 1; i <= m; ++i) fit += long_ar[i] * z[t - i];
    resid[t] = z[t] - fit;
  }

  std::vector<std::vector<double>> x2;
  std::vector<double> y2;
  for (int t = m + q; t < n; ++t) {
    std::vector<double> row;
    row.reserve(1 + p + q);
    row.push_back(1.0);
    for (int i = 1; i <= p; ++i) row.push_back(z[t - i]);
    for (int j = 1; j <= q; ++j) row.push_back(resid[t - j]);
    x2.push_back(std::move(row));
    y2.push_back(z[t]);
  }
  std::vector<double> start = least_squares(x2, y2);

  // Shrink toward zero until the start is stationary and invertible.
  auto valid = [&](std::span<const double> x) {
    std::span<const double> phi(x.data() + 1, p);
    std::span<const double> theta(x.data() + 1 + p, q);
    return unit_circle_excess(phi) == 0.0 &&
           unit_circle_excess(negate(theta)) == 0.0;
  };
  for (int tries = 0; tries < 200 && !valid(start); ++tries) {
    for (std::size_t i = 1; i < start.size(); ++i) start[i] *= 0.9;
  }
  return start;
}

bool ar_stationary(std::span<const double> phi) {
  return unit_circle_excess(phi) == 0.0;
}

bool ma_invertible(std::span<const double> theta) {
  return unit_circle_excess(negate(theta)) == 0.0;
}

double css_objective(std::span<const double> z, double intercept,
                     std::span<const double> phi,
                     std::span<const double> theta) {
  const int p = static_cast<int>(phi.size());
  const int q = static_cast<int>(theta.size());
  const int n = static_cast<int>(z.size());
  std::vector<double> eps(n, 0.0);  // residuals before the start stay zero
  double css = 0;
  for (int t = p; t < n; ++t) {
    double pred = intercept;
    for (int i = 1; i <= p; ++i) pred += phi[i - 1] * z[t - i];
    for (int j = 1; j <= q && t - j >= 0; ++j) {
      pred += theta[j - 1] * eps[t - j];
    }
    const double e = z[t] - pred;
    if (!std::isfinite(e)) return 1e12;
    eps[t] = e;
    css += e * e;
  }
  return css;
}

ArimaModel fit_arima(std::span<const double> series, const ArimaOrder& order,
                     std::uint64_t seed) {
  const int p = order.p, d = order.d, q = order.q;
  if (p < 0 || d < 0 || q < 0 || p + q < 1) {
    throw ValidationError("arima: order must have p,d,q >= 0 and p+q >= 1");
  }
  std::vector<double> z(series.begin(), series.end());
  for (int k = 0; k < d; ++k) {
    if (z.size() < 2) throw ValidationError("arima: series too short");
    z = diff_once(z);
  }
  if (static_cast<int>(z.size()) < 10 * (p + q)) {
    throw ValidationError("arima: series too short for order (" +
                          std::to_string(p) + "," + std::to_string(d) + "," +
                          std::to_string(q) + ")");
  }

  // Fit strictly inside the admissible region: CSS minima piling up at a
  // unit root (theta -> -1 on over-differenced data) make rolling forecasts
  // unstable, so the boundary is held off at 0.98.
  constexpr double kRootMargin = 0.98;
  auto objective = [&](std::span<const double> x) {
    std::span<const double> phi(x.data() + 1, p);
    std::span<const double> theta(x.data() + 1 + p, q);
    const double excess = unit_circle_excess(phi, kRootMargin) +
                          unit_circle_excess(negate(theta), kRootMargin);
    if (excess > 0) return 1e6 * (1.0 + excess);
    return css_objective(z, x[0], phi, theta);
  };

  const std::vector<double> start = hannan_rissanen_start(z, p, q);
  NelderMeadOptions opts;
  opts.max_iters = 400 * (1 + p + q);
  opts.tol = 1e-10;
  opts.init_step = 0.05;

  Rng rng(seed);
  std::vector<double> best_x = start;
  double best_f = objective(start);
  std::vector<double> x0 = start;
  for (int attempt = 0; attempt < 5; ++attempt) {
    const auto res = nelder_mead(objective, x0, opts);
    if (res.fx < best_f) {
      best_f = res.fx;
      best_x = res.x;
    }
    // Restart near the incumbent.
    x0 = best_x;
    for (double& v : x0) v += rng.uniform(-0.05, 0.05) * (1.0 + std::fabs(v));
  }

  ArimaModel m;
  m.order = order;
  m.intercept = best_x[0];
  m.ar.assign(best_x.begin() + 1, best_x.begin() + 1 + p);
  m.ma.assign(best_x.begin() + 1 + p, best_x.begin() + 1 + p + q);
  if (!ar_stationary(m.ar) || !ma_invertible(m.ma)) {
    throw ValidationError("arima: optimizer failed to find a stationary, "
                          "invertible model");
  }
  const int terms = static_cast<int>(z.size()) - p;
  m.sigma2 = best_f / std::max(terms, 1);
  return m;
}

double forecast_one(const ArimaModel& m, std::span<const double> history) {
  const int p = m.order.p, d = m.order.d, q = m.order.q;
  if (history.empty() || static_cast<int>(history.size()) < p + d) {
    throw ValidationError("arima: insufficient history to forecast");
  }
  // Difference d times, keeping the last value at every level so the
  // forecast can be integrated back to the original scale.
  std::vector<double> level(history.begin(), history.end());
  double integrate = 0;
  for (int k = 0; k < d; ++k) {
    integrate += level.back();
    level = diff_once(level);
  }
  const int n = static_cast<int>(level.size());

  // Teacher-forced residuals over the observed differenced history.
  std::vector<double> eps(n, 0.0);
  for (int t = p; t < n; ++t) {
    double pred = m.intercept;
    for (int i = 1; i <= p; ++i) pred += m.ar[i - 1] * level[t - i];
    for (int j = 1; j <= q && t - j >= 0; ++j) {
      pred += m.ma[j - 1] * eps[t - j];
    }
    eps[t] = level[t] - pred;
  }

  double zhat = m.intercept;
  for (int i = 1; i <= p; ++i) zhat += m.ar[i - 1] * level[n - i];
  for (int j = 1; j <= q && n - j >= 0; ++j) zhat += m.ma[j - 1] * eps[n - j];
  return zhat + integrate;
}

std::string ArimaModel::dump() const {
  std::ostringstream out;
  out << "order " << order.p << " " << order.d << " " << order.q << "\n";
  out << "intercept " << intercept << "\n";
  out << "ar";
  for (double v : ar) out << " " << v;
  out << "\nma";
  for (double v : ma) out << " " << v;
  out << "\nsigma2 " << sigma2 << "\n";
  return out.str();
}

}  // namespace stcast
