#pragma once
#include "fairens/estimator.hpp"

namespace fairens {

/// k-nearest-neighbors with euclidean distance and weighted votes.
/// Distance ties at the k-th position resolve by training row order;
/// vote ties in predict_proba split evenly and predict then favors 1.
class KNearestNeighbors : public Estimator {
 public:
  struct Params {
    std::size_t k = 5;
  };

  KNearestNeighbors() = default;
  explicit KNearestNeighbors(Params p) : params_(p) {}

  std::string name() const override { return "knn"; }
  void fit(const Matrix& X, const std::vector<int>& y,
           std::span<const double> weights) override;
  Matrix predict_proba(const Matrix& X) const override;
  std::unique_ptr<Estimator> clone_untrained() const override {
    return std::make_unique<KNearestNeighbors>(params_);
  }
  nlohmann::json to_json() const override;
  static std::unique_ptr<KNearestNeighbors> from_json(const nlohmann::json& j);

 private:
  Params params_;
  Matrix train_;
  std::vector<int> y_;
  std::vector<double> w_;
};

}  // namespace fairens
