#pragma once
#include "fairens/estimator.hpp"

namespace fairens {

enum class SplitCriterion { gini, entropy };

/// Greedy binary CART-style tree with weighted impurity.
/// Split ties are broken toward the lowest feature index, then the lowest
/// threshold, so fits are deterministic. min_samples_leaf counts rows
/// (unweighted); class distributions use weights, so scaling all weights
/// by a constant leaves the tree unchanged.
class DecisionTree : public Estimator {
 public:
  struct Params {
    SplitCriterion criterion = SplitCriterion::gini;
    int max_depth = -1;          // -1: unbounded
    std::size_t min_samples_leaf = 1;
  };

  DecisionTree() = default;
  explicit DecisionTree(Params p) : params_(p) {}

  std::string name() const override { return "decision_tree"; }
  void fit(const Matrix& X, const std::vector<int>& y,
           std::span<const double> weights) override;
  Matrix predict_proba(const Matrix& X) const override;
  std::unique_ptr<Estimator> clone_untrained() const override {
    return std::make_unique<DecisionTree>(params_);
  }
  nlohmann::json to_json() const override;
  static std::unique_ptr<DecisionTree> from_json(const nlohmann::json& j);

  struct Node {
    int feature = -1;        // -1 marks a leaf
    double threshold = 0.0;  // go left when x <= threshold
    int left = -1, right = -1;
    double p0 = 0.0, p1 = 0.0;  // leaf class distribution
  };
  const std::vector<Node>& nodes() const { return nodes_; }

 private:
  std::size_t build(const Matrix& X, const std::vector<int>& y,
                    std::span<const double> w, std::vector<std::size_t>& rows, int depth);

  Params params_;
  std::vector<Node> nodes_;
  std::size_t n_features_ = 0;
};

}  // namespace fairens
