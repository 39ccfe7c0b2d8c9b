#pragma once

#include <functional>
#include <span>
#include <vector>

namespace stcast {

struct NelderMeadOptions {
  int max_iters = 2000;
  double tol = 1e-10;       // stop when the simplex f-spread falls below this
  double init_step = 0.1;   // initial simplex edge length per coordinate
};

struct NelderMeadResult {
  std::vector<double> x;
  double fx = 0;
  int iterations = 0;
  bool converged = false;
};

/// Derivative-free simplex minimization. The returned point is never worse
/// than the start (the start is a simplex vertex).
NelderMeadResult nelder_mead(
    const std::function<double(std::span<const double>)>& f,
    std::span<const double> x0, const NelderMeadOptions& opts = {});

/// Central difference (f(x+e) - f(x-e)) / 2e. Requires eps > 0.
double central_diff(const std::function<double(double)>& f, double x,
                    double eps);

}  // namespace stcast
