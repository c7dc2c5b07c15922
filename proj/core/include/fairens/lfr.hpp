#pragma once
#include <map>

#include "fairens/matrix.hpp"
#include "fairens/pre_mitigator.hpp"

namespace fairens {

struct LfrParams {
  std::size_t prototypes = 5;
  double reconstruct_weight = 0.01;  // Ax
  double label_weight = 10.0;        // Ay
  double fairness_weight = 5.0;      // Az
  double temperature = 1.0;          // tau in the prototype softmax
  std::size_t max_iterations = 3000;
  double tolerance = 1e-6;
};

/// Objective for the fair-representation learner, exposed for gradient
/// checks. Parameter layout: k*d prototype coordinates (row-major, one
/// prototype per row) followed by k logit weights. Returns the value of
///   Ax * mean squared reconstruction error
/// + Ay * mean label cross-entropy through the prototype weights
/// + Az * sum_k |mean assignment gap between groups|
/// and fills `grad` (same layout) with its gradient; the |.| term uses
/// the sign subgradient, zero at equality.
double lfr_objective(const Matrix& x, const std::vector<int>& y,
                     const std::vector<std::uint8_t>& priv_mask,
                     const LfrParams& p, const std::vector<double>& theta,
                     std::vector<double>& grad);

/// Learned fair representation: k prototypes in feature space with a
/// softmax assignment; transform replaces the non-protected numeric
/// features with their reconstruction through the prototypes. Training
/// balances reconstruction, label fit, and equal mean prototype
/// assignment across groups. Sample weights are ignored during fitting.
class LearnedFairRepresentation : public PreMitigator {
 public:
  LearnedFairRepresentation(FairnessInfo fi, LfrParams params = {});

  std::string name() const override { return "lfr"; }
  void fit(const Dataset& d, std::uint64_t seed) override;
  Dataset transform(const Dataset& d) const override;
  nlohmann::json describe() const override;
  std::unique_ptr<PreMitigator> clone_unfitted() const override {
    return std::make_unique<LearnedFairRepresentation>(fi_, params_);
  }

  const LfrParams& params() const { return params_; }
  /// Final objective value reached by the optimizer.
  double objective() const { return objective_; }
  /// False when fit stopped at the iteration cap; the best iterate is
  /// kept either way.
  bool converged() const { return converged_; }

 private:
  // softmax assignment of each row of x to the prototypes
  Matrix assignments(const Matrix& x) const;

  FairnessInfo fi_;
  LfrParams params_;
  std::vector<std::string> feature_names_;  // columns the map applies to
  Matrix prototypes_;                       // k x d
  double objective_ = 0.0;
  bool converged_ = false;
  bool fitted_ = false;
};

}  // namespace fairens
