#pragma once
#include <functional>
#include <string>
#include <vector>

namespace fairens {

struct GdOptions {
  int max_iterations = 1000;
  double tolerance = 1e-8;       // relative objective change
  double initial_step = 1.0;
  double backtrack_factor = 0.5;
  double armijo_c = 1e-4;
  int max_backtracks = 60;
};

struct GdResult {
  std::vector<double> x;
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Objective callback: fills grad (same size as x) and returns f(x).
using ObjectiveFn = std::function<double(const std::vector<double>& x, std::vector<double>& grad)>;

/// Batch gradient descent with Armijo backtracking line search.
/// Throws OptimizationError (naming the iteration and gradient norm) when
/// the objective or gradient turns non-finite. When the line search stalls
/// the current iterate is returned.
GdResult gradient_descent(const ObjectiveFn& fn, std::vector<double> x0, const GdOptions& opts);

}  // namespace fairens
