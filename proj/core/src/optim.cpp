#include "fairens/optim.hpp"

#include <cmath>
#include <sstream>

#include "fairens/errors.hpp"

namespace fairens {

namespace {

double norm2(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

[[noreturn]] void diverged(int iter, double gnorm, const char* what) {
  std::ostringstream os;
  os << "optimizer diverged at iteration " << iter << " (gradient norm " << gnorm
     << "): " << what;
  throw OptimizationError(os.str());
}

}  // namespace

GdResult gradient_descent(const ObjectiveFn& fn, std::vector<double> x0, const GdOptions& opts) {
  std::vector<double> grad(x0.size(), 0.0);
  std::vector<double> trial(x0.size(), 0.0);
  std::vector<double> trial_grad(x0.size(), 0.0);

  double f = fn(x0, grad);
  if (!std::isfinite(f)) diverged(0, norm2(grad), "non-finite objective at start");

  GdResult res;
  res.x = std::move(x0);
  res.objective = f;

  double step = opts.initial_step;
  for (int iter = 0; iter < opts.max_iterations; ++iter) {
    double gnorm = norm2(grad);
    if (!std::isfinite(gnorm)) diverged(iter, gnorm, "non-finite gradient");
    if (gnorm == 0.0) {
      res.converged = true;
      res.iterations = iter;
      return res;
    }

    double g2 = gnorm * gnorm;
    double t = step;
    bool accepted = false;
    double f_new = f;
    for (int bt = 0; bt < opts.max_backtracks; ++bt) {
      for (std::size_t i = 0; i < res.x.size(); ++i) trial[i] = res.x[i] - t * grad[i];
      f_new = fn(trial, trial_grad);
      if (std::isfinite(f_new) && f_new <= f - opts.armijo_c * t * g2) {
        accepted = true;
        break;
      }
      t *= opts.backtrack_factor;
    }
    if (!accepted) {
      // no descent step found at the smallest scale: treat as converged
      res.converged = true;
      res.iterations = iter;
      return res;
    }

    res.x.swap(trial);
    grad.swap(trial_grad);
    double f_prev = f;
    f = f_new;
    res.objective = f;
    res.iterations = iter + 1;
    // allow the step to grow back after a successful iteration
    step = std::min(opts.initial_step, t * 2.0);

    if (std::fabs(f_prev - f) <= opts.tolerance * std::max(1.0, std::fabs(f_prev))) {
      res.converged = true;
      return res;
    }
  }
  return res;
}

}  // namespace fairens
