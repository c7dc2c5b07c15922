#pragma once
#include "fairens/estimator.hpp"

namespace fairens {

/// L2-regularized logistic regression fit with batch gradient descent and
/// backtracking line search (deterministic: zero initialization, fixed
/// iteration budget). The loss is the weighted mean log-loss plus
/// 0.5 * l2 * ||w||^2; the intercept is not regularized.
class LogisticRegression : public Estimator {
 public:
  struct Params {
    double l2 = 1e-4;
    double tolerance = 1e-8;
    int max_iterations = 1000;
  };

  LogisticRegression() = default;
  explicit LogisticRegression(Params p) : params_(p) {}

  std::string name() const override { return "logistic_regression"; }
  void fit(const Matrix& X, const std::vector<int>& y,
           std::span<const double> weights) override;
  Matrix predict_proba(const Matrix& X) const override;
  std::unique_ptr<Estimator> clone_untrained() const override {
    return std::make_unique<LogisticRegression>(params_);
  }
  nlohmann::json to_json() const override;
  static std::unique_ptr<LogisticRegression> from_json(const nlohmann::json& j);

  const std::vector<double>& coefficients() const { return coef_; }
  double intercept() const { return intercept_; }

 private:
  Params params_;
  std::vector<double> coef_;
  double intercept_ = 0.0;
  std::size_t n_features_ = 0;
};

/// Weighted-mean logistic loss with L2 on the coefficients (intercept
/// last, unregularized). Fills grad and returns the objective. Exposed
/// for gradient checking.
double logistic_objective(const Matrix& X, const std::vector<int>& y,
                          std::span<const double> weights, double l2,
                          const std::vector<double>& params, std::vector<double>& grad);

}  // namespace fairens
