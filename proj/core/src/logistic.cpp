#include "fairens/logistic.hpp"

#include <cmath>

#include "fairens/optim.hpp"

namespace fairens {

using nlohmann::json;

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// numerically stable log(1 + e^z)
double log1pexp(double z) {
  if (z > 35.0) return z;
  if (z < -35.0) return std::exp(z);
  return std::log1p(std::exp(z));
}

}  // namespace

double logistic_objective(const Matrix& X, const std::vector<int>& y,
                          std::span<const double> weights, double l2,
                          const std::vector<double>& params, std::vector<double>& grad) {
  const std::size_t n = X.rows, d = X.cols;
  grad.assign(d + 1, 0.0);
  double wsum = 0.0;
  for (double w : weights) wsum += w;

  double loss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double z = params[d];
    for (std::size_t j = 0; j < d; ++j) z += params[j] * X(i, j);
    double w = weights[i] / wsum;
    // log-loss: -y*log(p) - (1-y)*log(1-p) = log1pexp(z) - y*z
    loss += w * (log1pexp(z) - (y[i] == 1 ? z : 0.0));
    double resid = sigmoid(z) - (y[i] == 1 ? 1.0 : 0.0);
    for (std::size_t j = 0; j < d; ++j) grad[j] += w * resid * X(i, j);
    grad[d] += w * resid;
  }
  for (std::size_t j = 0; j < d; ++j) {
    loss += 0.5 * l2 * params[j] * params[j];
    grad[j] += l2 * params[j];
  }
  return loss;
}

void LogisticRegression::fit(const Matrix& X, const std::vector<int>& y,
                             std::span<const double> weights) {
  check_fit_inputs(X, y, weights);
  fit_notes_.clear();
  n_features_ = X.cols;
  coef_.assign(X.cols, 0.0);
  intercept_ = 0.0;
  if (detect_single_class(y)) {
    trained_ = true;
    return;
  }
  GdOptions opts;
  opts.max_iterations = params_.max_iterations;
  opts.tolerance = params_.tolerance;
  auto fn = [&](const std::vector<double>& p, std::vector<double>& g) {
    return logistic_objective(X, y, weights, params_.l2, p, g);
  };
  GdResult res = gradient_descent(fn, std::vector<double>(X.cols + 1, 0.0), opts);
  for (std::size_t j = 0; j < X.cols; ++j) coef_[j] = res.x[j];
  intercept_ = res.x[X.cols];
  trained_ = true;
}

Matrix LogisticRegression::predict_proba(const Matrix& X) const {
  require_trained();
  if (X.cols != n_features_)
    throw SchemaError("logistic_regression: expected " + std::to_string(n_features_) +
                      " features, got " + std::to_string(X.cols));
  Matrix out(X.rows, 2);
  for (std::size_t i = 0; i < X.rows; ++i) {
    double p1;
    if (single_class_ >= 0) {
      p1 = single_class_ == 1 ? 1.0 : 0.0;
    } else {
      double z = intercept_;
      for (std::size_t j = 0; j < n_features_; ++j) z += coef_[j] * X(i, j);
      p1 = sigmoid(z);
    }
    out(i, 0) = 1.0 - p1;
    out(i, 1) = p1;
  }
  return out;
}

json LogisticRegression::to_json() const {
  require_trained();
  return json{{"version", 1},
              {"kind", "logistic_regression"},
              {"l2", params_.l2},
              {"tolerance", params_.tolerance},
              {"max_iterations", params_.max_iterations},
              {"coefficients", coef_},
              {"intercept", intercept_},
              {"single_class", single_class_},
              {"n_features", n_features_}};
}

std::unique_ptr<LogisticRegression> LogisticRegression::from_json(const json& j) {
  Params p;
  p.l2 = j.at("l2").get<double>();
  p.tolerance = j.at("tolerance").get<double>();
  p.max_iterations = j.at("max_iterations").get<int>();
  auto m = std::make_unique<LogisticRegression>(p);
  m->coef_ = j.at("coefficients").get<std::vector<double>>();
  m->intercept_ = j.at("intercept").get<double>();
  m->single_class_ = j.at("single_class").get<int>();
  m->n_features_ = j.at("n_features").get<std::size_t>();
  m->trained_ = true;
  return m;
}

}  // namespace fairens
