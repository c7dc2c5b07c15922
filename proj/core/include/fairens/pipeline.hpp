#pragma once
#include "fairens/calibrated_eq_odds.hpp"
#include "fairens/classifier.hpp"
#include "fairens/plan.hpp"
#include "fairens/pre_mitigator.hpp"

namespace fairens {

/// Estimator names and in-estimator variants the plan builder draws
/// from. `base` backs the homogeneous ensembles, `members` the
/// heterogeneous ones, `final_estimator` the stacking head. When a
/// heterogeneous plan asks for in-estimator mitigation, all members are
/// replaced by one in-estimator variant per entry of `in_etas`.
struct Roster {
  std::string base = "tree";
  std::vector<std::string> members = {"tree", "logreg", "knn", "nb"};
  std::string final_estimator = "logreg";
  std::vector<double> in_etas = {1.0, 10.0, 100.0, 1000.0};

  nlohmann::json to_json() const;
  static Roster from_json(const nlohmann::json& j);
};

/// Matrix-level learner factory: tree, logreg, knn, nb.
std::unique_ptr<Estimator> make_learner(const std::string& name);

/// Pre-estimator mitigator factory. An empty config defaults to
/// reweighing. Hyperparameter keys: di_remover {repair_level},
/// lfr {k, Ax, Ay, Az, max_iterations}; unknown keys are errors.
std::unique_ptr<PreMitigator> make_pre_mitigator(const MitigatorConfig& config,
                                                 const FairnessInfo& fi);

/// In-estimator classifier factory (prejudice_remover; keys {eta,
/// max_iterations}). An empty config defaults to eta = 1.
std::unique_ptr<Classifier> make_in_classifier(const MitigatorConfig& config,
                                               const FairnessInfo& fi);

/// Cost constraint from a post-estimator config (key cost_constraint,
/// default weighted).
CalibratedEqOdds::Constraint post_constraint(const MitigatorConfig& config);

/// Classifier that fits a pre-estimator mitigator on its training view
/// and routes every later view through the fitted transform.
class PreMitigated : public Classifier {
 public:
  PreMitigated(std::unique_ptr<PreMitigator> mitigator, std::unique_ptr<Classifier> inner);

  std::string kind() const override { return "pre_mitigated"; }
  void fit(const Dataset& d, std::uint64_t seed) override;
  Matrix predict_proba(const Dataset& d) const override;
  bool provides_proba() const override { return inner_->provides_proba(); }
  nlohmann::json describe() const override;
  std::unique_ptr<Classifier> clone_untrained() const override;

 private:
  std::unique_ptr<PreMitigator> proto_;
  std::unique_ptr<Classifier> inner_;
  std::unique_ptr<PreMitigator> fitted_;
};

/// Classifier that carves a seeded stratified calibration holdout from
/// its training view, fits the inner classifier on the rest, and learns
/// a score adjustment on the holdout. Scores stay deterministic (the
/// adjustment returns expected mixed scores).
class PostMitigated : public Classifier {
 public:
  PostMitigated(std::unique_ptr<Classifier> inner, FairnessInfo fi,
                CalibratedEqOdds::Constraint constraint, double holdout_fraction = 0.3);

  std::string kind() const override { return "post_mitigated"; }
  void fit(const Dataset& d, std::uint64_t seed) override;
  Matrix predict_proba(const Dataset& d) const override;
  nlohmann::json describe() const override;
  std::unique_ptr<Classifier> clone_untrained() const override;

 private:
  std::unique_ptr<Classifier> inner_;
  FairnessInfo fi_;
  CalibratedEqOdds::Constraint constraint_;
  double holdout_fraction_;
  std::unique_ptr<Classifier> fitted_inner_;
  std::unique_ptr<CalibratedEqOdds> adjuster_;
};

/// A validated plan realized as a classifier tree, ready to fit.
class Pipeline {
 public:
  Pipeline(MitigationPlan plan, FairnessInfo fi, std::unique_ptr<Classifier> root);

  void fit(const Dataset& d, std::uint64_t seed);
  Matrix predict_proba(const Dataset& d) const;
  std::vector<int> predict(const Dataset& d) const;
  bool provides_proba() const { return root_->provides_proba(); }
  bool trained() const { return trained_; }

  const MitigationPlan& plan() const { return plan_; }
  const FairnessInfo& fairness_info() const { return fi_; }
  nlohmann::json describe() const;

 private:
  MitigationPlan plan_;
  FairnessInfo fi_;
  std::unique_ptr<Classifier> root_;
  bool trained_ = false;
};

/// Realize a plan against a roster. Throws BuildError when the plan is
/// rejected by validate_plan or an estimator name is unknown.
Pipeline build_pipeline(const MitigationPlan& plan, const Roster& roster,
                        const FairnessInfo& fi);

}  // namespace fairens
