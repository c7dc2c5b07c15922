#pragma once
#include <vector>

#include "fairens/classifier.hpp"

namespace fairens {

/// Bootstrap aggregation over clones of one base classifier. Each member
/// trains on a seeded with-replacement draw of ceil(fraction * n_rows)
/// rows, with draw probabilities proportional to the input sample
/// weights; drawn rows carry weight 1, the multiplicity of a row being
/// the weight signal. full_sample instead trains every member on the
/// untouched input, so n = 1 with full_sample reproduces the base
/// classifier exactly. predict_proba is the unweighted member mean.
class Bagging : public Classifier {
 public:
  struct Options {
    std::size_t n = 10;
    double fraction = 1.0;
    bool full_sample = false;
  };

  Bagging(std::unique_ptr<Classifier> base, Options options);

  std::string kind() const override { return "bagging"; }
  void fit(const Dataset& d, std::uint64_t seed) override;
  Matrix predict_proba(const Dataset& d) const override;
  bool provides_proba() const override { return base_->provides_proba(); }
  nlohmann::json describe() const override;
  std::unique_ptr<Classifier> clone_untrained() const override {
    return std::make_unique<Bagging>(base_->clone_untrained(), options_);
  }

  std::size_t member_count() const { return members_.size(); }
  const Classifier& member(std::size_t i) const { return *members_.at(i); }

 private:
  std::unique_ptr<Classifier> base_;
  Options options_;
  std::vector<std::unique_ptr<Classifier>> members_;
};

/// Discrete AdaBoost over clones of one base classifier. Rounds are
/// sequential: weighted error eps gives the round weight
/// alpha = ln((1 - eps) / eps), misclassified rows are upweighted by
/// exp(alpha), and the weights renormalize to a distribution after every
/// round. Rounds stop early when eps hits 0 or reaches 0.5. The
/// aggregate probability is the alpha-weighted mean of member
/// probabilities, so the base must expose them.
class Boosting : public Classifier {
 public:
  struct Options {
    std::size_t n = 50;
  };

  Boosting(std::unique_ptr<Classifier> base, Options options);

  std::string kind() const override { return "boosting"; }
  void fit(const Dataset& d, std::uint64_t seed) override;
  Matrix predict_proba(const Dataset& d) const override;
  nlohmann::json describe() const override;
  std::unique_ptr<Classifier> clone_untrained() const override {
    return std::make_unique<Boosting>(base_->clone_untrained(), options_);
  }

  std::size_t member_count() const { return members_.size(); }
  const std::vector<double>& alphas() const { return alphas_; }
  /// Notes about degenerate rounds (perfect base, worse than chance).
  const std::vector<std::string>& fit_notes() const { return notes_; }

 private:
  std::unique_ptr<Classifier> base_;
  Options options_;
  std::vector<std::unique_ptr<Classifier>> members_;
  std::vector<double> alphas_;
  std::vector<std::string> notes_;
};

/// Majority vote over a heterogeneous member list. Soft mode averages
/// member probabilities; hard mode counts predicted labels and reports
/// vote shares, which the score consumers must not treat as calibrated
/// (provides_proba is false). Label ties go to the favorable class.
class Voting : public Classifier {
 public:
  enum class Mode { hard, soft };

  Voting(std::vector<std::unique_ptr<Classifier>> members, Mode mode);

  std::string kind() const override { return "voting"; }
  void fit(const Dataset& d, std::uint64_t seed) override;
  Matrix predict_proba(const Dataset& d) const override;
  bool provides_proba() const override;
  nlohmann::json describe() const override;
  std::unique_ptr<Classifier> clone_untrained() const override;

  Mode mode() const { return mode_; }

 private:
  std::vector<std::unique_ptr<Classifier>> protos_;
  std::vector<std::unique_ptr<Classifier>> members_;
  Mode mode_;
};

/// Stacking with an out-of-fold meta-feature matrix: members are cloned
/// and fitted per internal stratified fold to produce leak-free
/// probabilities for every row, the final estimator trains on those
/// meta-features (columns m{i}_p0, m{i}_p1, plus every original column
/// when passthrough is on), and the members are refitted on the full
/// data for inference.
class Stacking : public Classifier {
 public:
  struct Options {
    bool passthrough = false;
    std::size_t meta_folds = 5;
  };

  Stacking(std::vector<std::unique_ptr<Classifier>> members,
           std::unique_ptr<Classifier> final_estimator, Options options,
           FairnessInfo fi);

  std::string kind() const override { return "stacking"; }
  void fit(const Dataset& d, std::uint64_t seed) override;
  Matrix predict_proba(const Dataset& d) const override;
  nlohmann::json describe() const override;
  std::unique_ptr<Classifier> clone_untrained() const override;

  bool passthrough() const { return options_.passthrough; }

 private:
  Dataset meta_dataset(const Dataset& d, const Matrix& member_probas) const;

  std::vector<std::unique_ptr<Classifier>> protos_;
  std::unique_ptr<Classifier> final_proto_;
  Options options_;
  FairnessInfo fi_;
  std::vector<std::unique_ptr<Classifier>> members_;
  std::unique_ptr<Classifier> final_;
};

}  // namespace fairens
