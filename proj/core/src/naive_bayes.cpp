#include "fairens/naive_bayes.hpp"

#include <cmath>

namespace fairens {

using nlohmann::json;

void NaiveBayesGaussian::fit(const Matrix& X, const std::vector<int>& y,
                             std::span<const double> weights) {
  check_fit_inputs(X, y, weights);
  fit_notes_.clear();
  n_features_ = X.cols;
  for (int c = 0; c < 2; ++c) {
    mean_[c].assign(X.cols, 0.0);
    var_[c].assign(X.cols, 1.0);
  }
  if (detect_single_class(y)) {
    trained_ = true;
    return;
  }

  double wsum[2] = {0.0, 0.0};
  for (std::size_t i = 0; i < X.rows; ++i) wsum[y[i]] += weights[i];
  double total = wsum[0] + wsum[1];
  for (int c = 0; c < 2; ++c) {
    if (wsum[c] <= 0.0)
      throw SchemaError("gaussian_nb: class " + std::to_string(c) + " has zero total weight");
    log_prior_[c] = std::log(wsum[c] / total);
  }

  for (std::size_t i = 0; i < X.rows; ++i) {
    int c = y[i];
    for (std::size_t j = 0; j < X.cols; ++j) mean_[c][j] += weights[i] * X(i, j);
  }
  for (int c = 0; c < 2; ++c)
    for (std::size_t j = 0; j < X.cols; ++j) mean_[c][j] /= wsum[c];
  for (int c = 0; c < 2; ++c) var_[c].assign(X.cols, 0.0);
  for (std::size_t i = 0; i < X.rows; ++i) {
    int c = y[i];
    for (std::size_t j = 0; j < X.cols; ++j) {
      double dlt = X(i, j) - mean_[c][j];
      var_[c][j] += weights[i] * dlt * dlt;
    }
  }
  for (int c = 0; c < 2; ++c)
    for (std::size_t j = 0; j < X.cols; ++j) {
      var_[c][j] /= wsum[c];
      if (var_[c][j] < params_.variance_floor) var_[c][j] = params_.variance_floor;
    }
  trained_ = true;
}

Matrix NaiveBayesGaussian::predict_proba(const Matrix& X) const {
  require_trained();
  if (X.cols != n_features_)
    throw SchemaError("gaussian_nb: expected " + std::to_string(n_features_) +
                      " features, got " + std::to_string(X.cols));
  Matrix out(X.rows, 2);
  for (std::size_t i = 0; i < X.rows; ++i) {
    if (single_class_ >= 0) {
      out(i, 0) = single_class_ == 0 ? 1.0 : 0.0;
      out(i, 1) = single_class_ == 1 ? 1.0 : 0.0;
      continue;
    }
    double logp[2];
    for (int c = 0; c < 2; ++c) {
      double lp = log_prior_[c];
      for (std::size_t j = 0; j < n_features_; ++j) {
        double dlt = X(i, j) - mean_[c][j];
        lp += -0.5 * std::log(2.0 * M_PI * var_[c][j]) - 0.5 * dlt * dlt / var_[c][j];
      }
      logp[c] = lp;
    }
    double m = std::max(logp[0], logp[1]);
    double e0 = std::exp(logp[0] - m), e1 = std::exp(logp[1] - m);
    out(i, 0) = e0 / (e0 + e1);
    out(i, 1) = e1 / (e0 + e1);
  }
  return out;
}

json NaiveBayesGaussian::to_json() const {
  require_trained();
  return json{{"version", 1},
              {"kind", "gaussian_nb"},
              {"variance_floor", params_.variance_floor},
              {"mean0", mean_[0]},
              {"mean1", mean_[1]},
              {"var0", var_[0]},
              {"var1", var_[1]},
              {"log_prior0", log_prior_[0]},
              {"log_prior1", log_prior_[1]},
              {"single_class", single_class_},
              {"n_features", n_features_}};
}

std::unique_ptr<NaiveBayesGaussian> NaiveBayesGaussian::from_json(const json& j) {
  Params p;
  p.variance_floor = j.at("variance_floor").get<double>();
  auto m = std::make_unique<NaiveBayesGaussian>(p);
  m->mean_[0] = j.at("mean0").get<std::vector<double>>();
  m->mean_[1] = j.at("mean1").get<std::vector<double>>();
  m->var_[0] = j.at("var0").get<std::vector<double>>();
  m->var_[1] = j.at("var1").get<std::vector<double>>();
  m->log_prior_[0] = j.at("log_prior0").get<double>();
  m->log_prior_[1] = j.at("log_prior1").get<double>();
  m->single_class_ = j.at("single_class").get<int>();
  m->n_features_ = j.at("n_features").get<std::size_t>();
  m->trained_ = true;
  return m;
}

}  // namespace fairens
