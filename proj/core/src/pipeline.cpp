#include "fairens/pipeline.hpp"

#include <algorithm>

#include "fairens/decision_tree.hpp"
#include "fairens/di_remover.hpp"
#include "fairens/ensembles.hpp"
#include "fairens/knn.hpp"
#include "fairens/lfr.hpp"
#include "fairens/logistic.hpp"
#include "fairens/naive_bayes.hpp"
#include "fairens/prejudice_remover.hpp"
#include "fairens/reweighing.hpp"
#include "fairens/rng.hpp"
#include "fairens/splits.hpp"

namespace fairens {

using nlohmann::json;

namespace {

void check_keys(const json& hp, std::initializer_list<const char*> allowed, const char* who) {
  for (const auto& item : hp.items()) {
    bool ok = std::any_of(allowed.begin(), allowed.end(),
                          [&](const char* a) { return item.key() == a; });
    if (!ok)
      throw ConfigError(std::string(who) + ": unknown hyperparameter '" + item.key() + "'");
  }
}

}  // namespace

json Roster::to_json() const {
  return {{"base", base},
          {"members", members},
          {"final_estimator", final_estimator},
          {"in_etas", in_etas}};
}

Roster Roster::from_json(const json& j) {
  Roster r;
  r.base = j.value("base", r.base);
  r.members = j.value("members", r.members);
  r.final_estimator = j.value("final_estimator", r.final_estimator);
  r.in_etas = j.value("in_etas", r.in_etas);
  if (r.members.size() < 2)
    throw ConfigError("roster: heterogeneous member list needs at least 2 entries");
  if (r.in_etas.size() < 2)
    throw ConfigError("roster: in-estimator eta list needs at least 2 entries");
  return r;
}

std::unique_ptr<Estimator> make_learner(const std::string& name) {
  if (name == "tree") return std::make_unique<DecisionTree>();
  if (name == "logreg") return std::make_unique<LogisticRegression>();
  if (name == "knn") return std::make_unique<KNearestNeighbors>();
  if (name == "nb") return std::make_unique<NaiveBayesGaussian>();
  throw BuildError("unknown estimator '" + name + "' (expected tree, logreg, knn, or nb)");
}

std::unique_ptr<PreMitigator> make_pre_mitigator(const MitigatorConfig& config,
                                                 const FairnessInfo& fi) {
  if (config.empty() || config.name == "reweighing") {
    check_keys(config.hyperparameters, {}, "reweighing");
    return std::make_unique<Reweighing>(fi);
  }
  if (config.name == "di_remover") {
    check_keys(config.hyperparameters, {"repair_level"}, "di_remover");
    return std::make_unique<DisparateImpactRemover>(
        fi, config.hyperparameters.value("repair_level", 1.0));
  }
  if (config.name == "lfr") {
    check_keys(config.hyperparameters, {"k", "Ax", "Ay", "Az", "max_iterations"}, "lfr");
    LfrParams p;
    p.prototypes = config.hyperparameters.value("k", p.prototypes);
    p.reconstruct_weight = config.hyperparameters.value("Ax", p.reconstruct_weight);
    p.label_weight = config.hyperparameters.value("Ay", p.label_weight);
    p.fairness_weight = config.hyperparameters.value("Az", p.fairness_weight);
    p.max_iterations = config.hyperparameters.value("max_iterations", p.max_iterations);
    return std::make_unique<LearnedFairRepresentation>(fi, p);
  }
  throw BuildError("unknown pre-estimator mitigator '" + config.name + "'");
}

std::unique_ptr<Classifier> make_in_classifier(const MitigatorConfig& config,
                                               const FairnessInfo& fi) {
  if (!config.empty() && config.name != "prejudice_remover")
    throw BuildError("unknown in-estimator mitigator '" + config.name + "'");
  check_keys(config.hyperparameters, {"eta", "max_iterations"}, "prejudice_remover");
  PrejudiceRemover::Params p;
  p.eta = config.hyperparameters.value("eta", p.eta);
  p.max_iterations = config.hyperparameters.value("max_iterations", p.max_iterations);
  return std::make_unique<PrejudiceRemover>(fi, p);
}

CalibratedEqOdds::Constraint post_constraint(const MitigatorConfig& config) {
  if (!config.empty() && config.name != "calibrated_eq_odds")
    throw BuildError("unknown post-estimator mitigator '" + config.name + "'");
  check_keys(config.hyperparameters, {"cost_constraint"}, "calibrated_eq_odds");
  return CalibratedEqOdds::constraint_from_name(
      config.hyperparameters.value("cost_constraint", std::string("weighted")));
}

PreMitigated::PreMitigated(std::unique_ptr<PreMitigator> mitigator,
                           std::unique_ptr<Classifier> inner)
    : proto_(std::move(mitigator)), inner_(std::move(inner)) {
  if (!proto_) throw BuildError("pre_mitigated: mitigator required");
  if (!inner_) throw BuildError("pre_mitigated: inner classifier required");
}

void PreMitigated::fit(const Dataset& d, std::uint64_t seed) {
  fitted_ = proto_->clone_unfitted();
  fitted_->fit(d, mix_seed(seed, 0, 0, 101));
  inner_->fit(fitted_->transform(d), mix_seed(seed, 0, 0, 102));
}

Matrix PreMitigated::predict_proba(const Dataset& d) const {
  if (!fitted_) throw NotTrainedError("pre_mitigated: predict before fit");
  return inner_->predict_proba(fitted_->transform(d));
}

json PreMitigated::describe() const {
  return {{"kind", "pre_mitigated"},
          {"mitigator", fitted_ ? fitted_->describe() : proto_->describe()},
          {"inner", inner_->describe()}};
}

std::unique_ptr<Classifier> PreMitigated::clone_untrained() const {
  return std::make_unique<PreMitigated>(proto_->clone_unfitted(), inner_->clone_untrained());
}

PostMitigated::PostMitigated(std::unique_ptr<Classifier> inner, FairnessInfo fi,
                             CalibratedEqOdds::Constraint constraint, double holdout_fraction)
    : inner_(std::move(inner)),
      fi_(std::move(fi)),
      constraint_(constraint),
      holdout_fraction_(holdout_fraction) {
  if (!inner_) throw BuildError("post_mitigated: inner classifier required");
  if (!inner_->provides_proba())
    throw BuildError("post_mitigated: the upstream classifier exposes no scores for "
                     "the post-estimator mitigator to adjust");
  if (!(holdout_fraction_ > 0.0) || !(holdout_fraction_ < 1.0))
    throw ConfigError("post_mitigated: holdout fraction must be in (0, 1)");
}

void PostMitigated::fit(const Dataset& d, std::uint64_t seed) {
  FoldSplit split = stratified_holdout(d, fi_, holdout_fraction_, mix_seed(seed, 0, 0, 103));
  if (split.test.empty())
    throw DegenerateGroupError("post_mitigated: training view too small for a calibration holdout");
  Dataset train = d.subset(split.train);
  Dataset holdout = d.subset(split.test);
  fitted_inner_ = inner_->clone_untrained();
  fitted_inner_->fit(train, mix_seed(seed, 0, 0, 104));
  Matrix p = fitted_inner_->predict_proba(holdout);
  std::vector<double> scores(p.rows);
  for (std::size_t i = 0; i < p.rows; ++i) scores[i] = p(i, 1);
  adjuster_ = std::make_unique<CalibratedEqOdds>(fi_, constraint_);
  adjuster_->fit(scores, holdout);
}

Matrix PostMitigated::predict_proba(const Dataset& d) const {
  if (!adjuster_) throw NotTrainedError("post_mitigated: predict before fit");
  Matrix p = fitted_inner_->predict_proba(d);
  std::vector<double> scores(p.rows);
  for (std::size_t i = 0; i < p.rows; ++i) scores[i] = p(i, 1);
  std::vector<double> adjusted = adjuster_->adjust(scores, d);
  Matrix out(d.n_rows(), 2);
  for (std::size_t i = 0; i < d.n_rows(); ++i) {
    out(i, 1) = adjusted[i];
    out(i, 0) = 1.0 - adjusted[i];
  }
  return out;
}

json PostMitigated::describe() const {
  json j{{"kind", "post_mitigated"},
         {"cost_constraint", CalibratedEqOdds::constraint_name(constraint_)},
         {"holdout_fraction", holdout_fraction_},
         {"inner", inner_->describe()}};
  if (adjuster_) j["adjustment"] = adjuster_->describe();
  return j;
}

std::unique_ptr<Classifier> PostMitigated::clone_untrained() const {
  return std::make_unique<PostMitigated>(inner_->clone_untrained(), fi_, constraint_,
                                         holdout_fraction_);
}

Pipeline::Pipeline(MitigationPlan plan, FairnessInfo fi, std::unique_ptr<Classifier> root)
    : plan_(std::move(plan)), fi_(std::move(fi)), root_(std::move(root)) {
  if (!root_) throw BuildError("pipeline: empty classifier tree");
}

void Pipeline::fit(const Dataset& d, std::uint64_t seed) {
  root_->fit(d, seed);
  trained_ = true;
}

Matrix Pipeline::predict_proba(const Dataset& d) const {
  if (!trained_) throw NotTrainedError("pipeline: predict before fit");
  return root_->predict_proba(d);
}

std::vector<int> Pipeline::predict(const Dataset& d) const {
  if (!trained_) throw NotTrainedError("pipeline: predict before fit");
  return root_->predict(d);
}

json Pipeline::describe() const {
  return {{"plan", plan_.to_json()},
          {"notation", plan_.notation()},
          {"trained", trained_},
          {"model", root_->describe()}};
}

Pipeline build_pipeline(const MitigationPlan& plan, const Roster& roster,
                        const FairnessInfo& fi) {
  if (auto reason = validate_plan(plan))
    throw BuildError("invalid plan " + plan.notation() + ": " + *reason);

  const bool est_level = plan.mitigator != MitigatorKind::none &&
                         plan.level == MitigationLevel::estimator;

  auto wrap_member = [&](std::unique_ptr<Classifier> inner) -> std::unique_ptr<Classifier> {
    switch (plan.mitigator) {
      case MitigatorKind::pre:
        return std::make_unique<PreMitigated>(make_pre_mitigator(plan.config, fi),
                                              std::move(inner));
      case MitigatorKind::in:
        return make_in_classifier(plan.config, fi);
      case MitigatorKind::post:
        return std::make_unique<PostMitigated>(std::move(inner), fi,
                                               post_constraint(plan.config));
      default:
        return inner;
    }
  };

  auto homogeneous_base = [&]() -> std::unique_ptr<Classifier> {
    auto learner = std::make_unique<LearnerClassifier>(make_learner(roster.base));
    return est_level ? wrap_member(std::move(learner)) : std::move(learner);
  };

  auto hetero_members = [&](bool mitigated) {
    std::vector<std::unique_ptr<Classifier>> ms;
    if (mitigated && plan.mitigator == MitigatorKind::in) {
      // the heterogeneous in-estimator roster: one variant per strength
      for (double eta : roster.in_etas) {
        MitigatorConfig c{"prejudice_remover", json{{"eta", eta}}};
        ms.push_back(make_in_classifier(c, fi));
      }
      return ms;
    }
    for (const auto& name : roster.members) {
      auto learner = std::make_unique<LearnerClassifier>(make_learner(name));
      ms.push_back(mitigated ? wrap_member(std::move(learner)) : std::move(learner));
    }
    return ms;
  };

  std::unique_ptr<Classifier> root;
  switch (plan.ensemble) {
    case EnsembleKind::none:
      root = homogeneous_base();
      break;
    case EnsembleKind::bagging:
      root = std::make_unique<Bagging>(
          homogeneous_base(),
          Bagging::Options{static_cast<std::size_t>(plan.n), 1.0, false});
      break;
    case EnsembleKind::boosting:
      root = std::make_unique<Boosting>(
          homogeneous_base(), Boosting::Options{static_cast<std::size_t>(plan.n)});
      break;
    case EnsembleKind::voting:
      root = std::make_unique<Voting>(
          hetero_members(est_level),
          plan.voting_mode == "hard" ? Voting::Mode::hard : Voting::Mode::soft);
      break;
    case EnsembleKind::stacking: {
      auto final_learner =
          std::make_unique<LearnerClassifier>(make_learner(roster.final_estimator));
      std::unique_ptr<Classifier> final_est =
          est_level && plan.mitigate_final ? wrap_member(std::move(final_learner))
                                           : std::move(final_learner);
      root = std::make_unique<Stacking>(hetero_members(est_level && plan.mitigate_base),
                                        std::move(final_est),
                                        Stacking::Options{plan.passthrough, 5}, fi);
      break;
    }
  }

  if (plan.mitigator != MitigatorKind::none && plan.level == MitigationLevel::ensemble) {
    if (plan.mitigator == MitigatorKind::pre)
      root = std::make_unique<PreMitigated>(make_pre_mitigator(plan.config, fi),
                                            std::move(root));
    else
      root = std::make_unique<PostMitigated>(std::move(root), fi,
                                             post_constraint(plan.config));
  }

  return Pipeline(plan, fi, std::move(root));
}

}  // namespace fairens
