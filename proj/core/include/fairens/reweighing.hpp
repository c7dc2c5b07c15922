#pragma once
#include "fairens/pre_mitigator.hpp"

namespace fairens {

/// Weight table w(g, c) = P(g) * P(c) / P(g, c) over the four
/// (group, class) cells, with probabilities taken as weighted empirical
/// frequencies of the fit data. transform multiplies row weights by the
/// factor of their cell, which makes group and class independent under
/// the new weights: the weighted favorable rate is equal across groups.
class Reweighing : public PreMitigator {
 public:
  explicit Reweighing(FairnessInfo fi) : fi_(std::move(fi)) {}

  std::string name() const override { return "reweighing"; }
  void fit(const Dataset& d, std::uint64_t seed) override;
  Dataset transform(const Dataset& d) const override;
  nlohmann::json describe() const override;
  std::unique_ptr<PreMitigator> clone_unfitted() const override {
    return std::make_unique<Reweighing>(fi_);
  }

  /// factor(group, class): group 1 = privileged, class 1 = favorable
  double factor(int group, int cls) const { return factors_[group][cls]; }

 private:
  FairnessInfo fi_;
  double factors_[2][2] = {{1, 1}, {1, 1}};
  bool fitted_ = false;
};

}  // namespace fairens
