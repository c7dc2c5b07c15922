#pragma once
#include <map>

#include "fairens/pre_mitigator.hpp"

namespace fairens {

/// Group-conditional quantile repair. For each non-protected numeric
/// feature it learns per-group empirical quantile functions; transform
/// maps a value x in group g to (1 - lambda) * x + lambda * Q(F_g(x)),
/// where Q is the pointwise median of the group quantile functions
/// (the mean, for two groups). lambda = 0 returns features bit-identical;
/// lambda = 1 aligns the group distributions. Monotone within a group.
class DisparateImpactRemover : public PreMitigator {
 public:
  DisparateImpactRemover(FairnessInfo fi, double repair_level);

  std::string name() const override { return "di_remover"; }
  void fit(const Dataset& d, std::uint64_t seed) override;
  Dataset transform(const Dataset& d) const override;
  nlohmann::json describe() const override;
  std::unique_ptr<PreMitigator> clone_unfitted() const override {
    return std::make_unique<DisparateImpactRemover>(fi_, lambda_);
  }

  double repair_level() const { return lambda_; }

 private:
  // sorted observed values of one feature within one group
  struct GroupQuantiles {
    std::vector<double> sorted;
    double quantile(double u) const;   // midpoint-interpolated inverse CDF
    double cdf(double x) const;        // midpoint-interpolated CDF
  };

  FairnessInfo fi_;
  double lambda_;
  std::map<std::string, GroupQuantiles> priv_, unpriv_;
  bool fitted_ = false;
};

}  // namespace fairens
