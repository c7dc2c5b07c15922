#pragma once
#include "fairens/classifier.hpp"

namespace fairens {

/// Regularized logistic objective plus eta times the mutual information
/// between the soft prediction and group membership, both computed from
/// expected (weight-sum) counts. Parameter layout matches the logistic
/// objective: coefficients then intercept last. Fills grad and returns
/// the objective; exposed for gradient checking. eta = 0 evaluates the
/// plain logistic objective bit for bit.
double prejudice_objective(const Matrix& x, const std::vector<int>& y,
                           const std::vector<std::uint8_t>& priv_mask,
                           std::span<const double> weights, double eta, double l2,
                           const std::vector<double>& params, std::vector<double>& grad);

/// In-estimator mitigation: a logistic model whose training objective
/// penalizes mutual information between its prediction and the group.
/// With eta = 0 the optimizer follows the exact trajectory of the plain
/// logistic learner, so the two produce identical models.
class PrejudiceRemover : public Classifier {
 public:
  struct Params {
    double eta = 1.0;
    double l2 = 1e-4;
    double tolerance = 1e-8;
    int max_iterations = 1000;
  };

  explicit PrejudiceRemover(FairnessInfo fi) : PrejudiceRemover(std::move(fi), Params{}) {}
  PrejudiceRemover(FairnessInfo fi, Params params);

  std::string kind() const override { return "prejudice_remover"; }
  void fit(const Dataset& d, std::uint64_t seed) override;
  Matrix predict_proba(const Dataset& d) const override;
  nlohmann::json describe() const override;
  std::unique_ptr<Classifier> clone_untrained() const override {
    return std::make_unique<PrejudiceRemover>(fi_, params_);
  }

  const Params& params() const { return params_; }
  const std::vector<double>& coefficients() const { return coef_; }
  double intercept() const { return intercept_; }

 private:
  FairnessInfo fi_;
  Params params_;
  std::vector<double> coef_;
  double intercept_ = 0.0;
  std::size_t n_features_ = 0;
  bool fitted_ = false;
};

}  // namespace fairens
