#include "stcast/optim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace stcast {

NelderMeadResult nelder_mead(
    const std::function<double(std::span<const double>)>& f,
    std::span<const double> x0, const NelderMeadOptions& opts) {
  const int n = static_cast<int>(x0.size());
  if (n == 0) throw std::invalid_argument("nelder_mead: empty start point");

  // Standard coefficients: reflection, expansion, contraction, shrink.
  constexpr double kReflect = 1.0;
  constexpr double kExpand = 2.0;
  constexpr double kContract = 0.5;
  constexpr double kShrink = 0.5;

  std::vector<std::vector<double>> x(n + 1, std::vector<double>(x0.begin(), x0.end()));
  for (int j = 1; j <= n; ++j) {
    x[j][j - 1] += opts.init_step * (1.0 + std::fabs(x[j][j - 1]));
  }
  std::vector<double> fx(n + 1);
  for (int j = 0; j <= n; ++j) fx[j] = f(x[j]);

  auto order = [&]() {
    std::vector<int> idx(n + 1);
    for (int i = 0; i <= n; ++i) idx[i] = i;
    std::stable_sort(idx.begin(), idx.end(),
                     [&](int a, int b) { return fx[a] < fx[b]; });
    std::vector<std::vector<double>> x2(n + 1);
    std::vector<double> f2(n + 1);
    for (int i = 0; i <= n; ++i) {
      x2[i] = std::move(x[idx[i]]);
      f2[i] = fx[idx[i]];
    }
    x = std::move(x2);
    fx = std::move(f2);
  };

  NelderMeadResult res;
  int iter = 0;
  for (; iter < opts.max_iters; ++iter) {
    order();
    if (std::fabs(fx[n] - fx[0]) <= opts.tol) {
      res.converged = true;
      break;
    }
    // Centroid of all but the worst vertex.
    std::vector<double> centroid(n, 0.0);
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) centroid[i] += x[j][i];
    }
    for (int i = 0; i < n; ++i) centroid[i] /= n;

    auto blend = [&](double coeff) {
      std::vector<double> p(n);
      for (int i = 0; i < n; ++i) {
        p[i] = centroid[i] + coeff * (centroid[i] - x[n][i]);
      }
      return p;
    };

    std::vector<double> reflected = blend(kReflect);
    const double f_reflected = f(reflected);
    if (f_reflected < fx[0]) {
      std::vector<double> expanded = blend(kExpand);
      const double f_expanded = f(expanded);
      if (f_expanded < f_reflected) {
        x[n] = std::move(expanded);
        fx[n] = f_expanded;
      } else {
        x[n] = std::move(reflected);
        fx[n] = f_reflected;
      }
    } else if (f_reflected < fx[n - 1]) {
      x[n] = std::move(reflected);
      fx[n] = f_reflected;
    } else {
      const bool outside = f_reflected < fx[n];
      std::vector<double> contracted(n);
      const auto& toward = outside ? reflected : x[n];
      for (int i = 0; i < n; ++i) {
        contracted[i] = centroid[i] + kContract * (toward[i] - centroid[i]);
      }
      const double f_contracted = f(contracted);
      if (f_contracted < (outside ? f_reflected : fx[n])) {
        x[n] = std::move(contracted);
        fx[n] = f_contracted;
      } else {
        for (int j = 1; j <= n; ++j) {
          for (int i = 0; i < n; ++i) {
            x[j][i] = x[0][i] + kShrink * (x[j][i] - x[0][i]);
          }
          fx[j] = f(x[j]);
        }
      }
    }
  }
  order();
  res.x = x[0];
  res.fx = fx[0];
  res.iterations = iter;
  return res;
}

double central_diff(const std::function<double(double)>& f, double x,
                    double eps) {
  if (eps <= 0) throw std::invalid_argument("central_diff: eps must be > 0");
  return (f(x + eps) - f(x - eps)) / (2.0 * eps);
}

}  // namespace stcast
