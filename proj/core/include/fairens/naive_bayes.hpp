#pragma once
#include "fairens/estimator.hpp"

namespace fairens {

/// Gaussian naive Bayes with weighted per-class feature means/variances
/// (population form) and weighted class priors. Variances are floored
/// to keep likelihoods finite on constant features.
class NaiveBayesGaussian : public Estimator {
 public:
  struct Params {
    double variance_floor = 1e-9;
  };

  NaiveBayesGaussian() = default;
  explicit NaiveBayesGaussian(Params p) : params_(p) {}

  std::string name() const override { return "gaussian_nb"; }
  void fit(const Matrix& X, const std::vector<int>& y,
           std::span<const double> weights) override;
  Matrix predict_proba(const Matrix& X) const override;
  std::unique_ptr<Estimator> clone_untrained() const override {
    return std::make_unique<NaiveBayesGaussian>(params_);
  }
  nlohmann::json to_json() const override;
  static std::unique_ptr<NaiveBayesGaussian> from_json(const nlohmann::json& j);

 private:
  Params params_;
  std::vector<double> mean_[2], var_[2];
  double log_prior_[2] = {0.0, 0.0};
  std::size_t n_features_ = 0;
};

}  // namespace fairens
