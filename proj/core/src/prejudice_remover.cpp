#include "fairens/prejudice_remover.hpp"

#include <algorithm>
#include <cmath>

#include "fairens/logistic.hpp"
#include "fairens/optim.hpp"

namespace fairens {

using nlohmann::json;

namespace {

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace

double prejudice_objective(const Matrix& x, const std::vector<int>& y,
                           const std::vector<std::uint8_t>& priv_mask,
                           std::span<const double> weights, double eta, double l2,
                           const std::vector<double>& params, std::vector<double>& grad) {
  double f = logistic_objective(x, y, weights, l2, params, grad);
  if (eta == 0.0) return f;

  const std::size_t n = x.rows, d = x.cols;
  const double p_floor = 1e-15;

  // soft joint counts of (prediction, group) from expected weight sums
  std::vector<double> p(n);
  double total_w = 0.0, n_priv = 0.0, q1_priv = 0.0, q1_unpriv = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double z = params[d];
    for (std::size_t c = 0; c < d; ++c) z += params[c] * x(i, c);
    p[i] = std::clamp(sigmoid(z), p_floor, 1.0 - p_floor);
    total_w += weights[i];
    if (priv_mask[i]) {
      n_priv += weights[i];
      q1_priv += weights[i] * p[i];
    } else {
      q1_unpriv += weights[i] * p[i];
    }
  }
  double n_unpriv = total_w - n_priv;
  double q0_priv = n_priv - q1_priv;
  double q0_unpriv = n_unpriv - q1_unpriv;
  double q1 = q1_priv + q1_unpriv;
  double q0 = q0_priv + q0_unpriv;

  auto xlogx = [](double v) { return v > 0.0 ? v * std::log(v) : 0.0; };
  double mi = (xlogx(q1_priv) + xlogx(q0_priv) + xlogx(q1_unpriv) + xlogx(q0_unpriv) -
               xlogx(q1) - xlogx(q0) - xlogx(n_priv) - xlogx(n_unpriv) +
               xlogx(total_w)) /
              total_w;

  double base = std::log(q1) - std::log(q0);
  for (std::size_t i = 0; i < n; ++i) {
    double group_ratio = priv_mask[i] ? std::log(q1_priv) - std::log(q0_priv)
                                      : std::log(q1_unpriv) - std::log(q0_unpriv);
    double dmi = weights[i] / total_w * (group_ratio - base);
    double chain = eta * dmi * p[i] * (1.0 - p[i]);
    for (std::size_t c = 0; c < d; ++c) grad[c] += chain * x(i, c);
    grad[d] += chain;
  }
  return f + eta * mi;
}

PrejudiceRemover::PrejudiceRemover(FairnessInfo fi, Params params)
    : fi_(std::move(fi)), params_(params) {
  if (params_.eta < 0.0) throw ConfigError("prejudice_remover: eta must be non-negative");
}

void PrejudiceRemover::fit(const Dataset& d, std::uint64_t) {
  GroupEncoding enc = bind_groups(d, fi_);
  Matrix x = d.feature_matrix();
  std::vector<int> y(d.n_rows());
  for (std::size_t i = 0; i < d.n_rows(); ++i) y[i] = enc.fav_mask[i] ? 1 : 0;
  std::span<const double> w(d.weights);

  GdOptions opts;
  opts.max_iterations = params_.max_iterations;
  opts.tolerance = params_.tolerance;
  std::vector<double> theta(x.cols + 1, 0.0);
  GdResult res = gradient_descent(
      [&](const std::vector<double>& t, std::vector<double>& g) {
        return prejudice_objective(x, y, enc.priv_mask, w, params_.eta,
                                   params_.l2, t, g);
      },
      theta, opts);

  coef_.assign(res.x.begin(), res.x.end() - 1);
  intercept_ = res.x.back();
  n_features_ = x.cols;
  fitted_ = true;
}

Matrix PrejudiceRemover::predict_proba(const Dataset& d) const {
  if (!fitted_) throw NotTrainedError("prejudice_remover: predict before fit");
  Matrix x = d.feature_matrix();
  if (x.cols != n_features_)
    throw SchemaError("prejudice_remover: expected " + std::to_string(n_features_) +
                      " features, got " + std::to_string(x.cols));
  Matrix out(x.rows, 2);
  for (std::size_t i = 0; i < x.rows; ++i) {
    double z = intercept_;
    for (std::size_t c = 0; c < x.cols; ++c) z += coef_[c] * x(i, c);
    double p = sigmoid(z);
    out(i, 0) = 1.0 - p;
    out(i, 1) = p;
  }
  return out;
}

json PrejudiceRemover::describe() const {
  return {{"kind", "classifier"},
          {"name", "prejudice_remover"},
          {"eta", params_.eta},
          {"fitted", fitted_}};
}

}  // namespace fairens
