#pragma once
#include <cstdint>
#include <memory>

#include <json.hpp>

#include "fairens/dataset.hpp"
#include "fairens/estimator.hpp"

namespace fairens {

/// Dataset-level classifier contract. Composition wrappers (mitigators,
/// ensembles, pipelines) all satisfy it, so any node can appear anywhere
/// a member is expected. fit() takes a seed so stochastic nodes derive
/// their randomness deterministically.
class Classifier {
 public:
  virtual ~Classifier() = default;

  virtual std::string kind() const = 0;
  virtual void fit(const Dataset& d, std::uint64_t seed) = 0;
  /// Row-stochastic n x 2 matrix, columns [P(y=0), P(y=1)].
  virtual Matrix predict_proba(const Dataset& d) const = 0;
  /// argmax of predict_proba with ties toward the favorable class.
  virtual std::vector<int> predict(const Dataset& d) const;

  virtual bool provides_proba() const { return true; }
  /// Structure tree of the (possibly trained) node, for inspection.
  virtual nlohmann::json describe() const = 0;
  virtual std::unique_ptr<Classifier> clone_untrained() const = 0;
};

/// Adapts a matrix-level learner to the dataset contract: features come
/// from feature_matrix(), labels from binary_labels(), weights pass
/// through. Ignores the fit seed (the learners are deterministic).
class LearnerClassifier : public Classifier {
 public:
  explicit LearnerClassifier(std::unique_ptr<Estimator> proto);

  std::string kind() const override { return "learner"; }
  void fit(const Dataset& d, std::uint64_t seed) override;
  Matrix predict_proba(const Dataset& d) const override;
  nlohmann::json describe() const override;
  std::unique_ptr<Classifier> clone_untrained() const override;

  const Estimator* fitted() const { return fitted_.get(); }

 private:
  std::unique_ptr<Estimator> proto_;
  std::unique_ptr<Estimator> fitted_;
};

}  // namespace fairens
