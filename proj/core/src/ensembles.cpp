#include "fairens/ensembles.hpp"

#include <algorithm>
#include <cmath>

#include "fairens/rng.hpp"
#include "fairens/splits.hpp"

namespace fairens {

using nlohmann::json;

namespace {

// Rethrow a member failure with its position so the caller can tell
// which fit aborted the ensemble.
[[noreturn]] void member_failed(const char* ensemble, std::size_t index,
                                const std::exception& e) {
  throw BuildError(std::string(ensemble) + " member " + std::to_string(index) +
                   " failed: " + e.what());
}

}  // namespace

Bagging::Bagging(std::unique_ptr<Classifier> base, Options options)
    : base_(std::move(base)), options_(options) {
  if (!base_) throw BuildError("bagging needs a base classifier");
  if (options_.n < 1) throw ConfigError("bagging: n must be at least 1");
  if (options_.fraction <= 0.0 || options_.fraction > 1.0)
    throw ConfigError("bagging: sample fraction must be in (0, 1]");
}

void Bagging::fit(const Dataset& d, std::uint64_t seed) {
  members_.clear();
  std::vector<double> cumulative(d.n_rows());
  double running = 0.0;
  for (std::size_t i = 0; i < d.n_rows(); ++i) {
    running += d.weights[i];
    cumulative[i] = running;
  }
  if (!(running > 0.0)) throw SchemaError("bagging: total sample weight must be positive");

  const auto draw_size =
      static_cast<std::size_t>(std::ceil(options_.fraction * static_cast<double>(d.n_rows())));
  for (std::size_t t = 0; t < options_.n; ++t) {
    auto member = base_->clone_untrained();
    std::uint64_t member_seed = mix_seed(seed, t);
    try {
      if (options_.full_sample) {
        member->fit(d, member_seed);
      } else {
        Rng rng(member_seed);
        std::vector<std::size_t> rows(draw_size);
        for (auto& r : rows) r = rng.discrete(cumulative);
        Dataset sample = d.subset(rows);
        std::fill(sample.weights.begin(), sample.weights.end(), 1.0);
        member->fit(sample, member_seed);
      }
    } catch (const std::exception& e) {
      member_failed("bagging", t, e);
    }
    members_.push_back(std::move(member));
  }
}

Matrix Bagging::predict_proba(const Dataset& d) const {
  if (members_.empty()) throw NotTrainedError("bagging: predict before fit");
  Matrix mean(d.n_rows(), 2);
  for (const auto& m : members_) {
    Matrix p = m->predict_proba(d);
    for (std::size_t i = 0; i < p.rows; ++i) {
      mean(i, 0) += p(i, 0);
      mean(i, 1) += p(i, 1);
    }
  }
  const double inv = 1.0 / static_cast<double>(members_.size());
  for (double& v : mean.data) v *= inv;
  return mean;
}

json Bagging::describe() const {
  json j{{"kind", "bagging"},
         {"n", options_.n},
         {"fraction", options_.fraction},
         {"full_sample", options_.full_sample},
         {"base", base_->describe()}};
  j["trained_members"] = members_.size();
  return j;
}

Boosting::Boosting(std::unique_ptr<Classifier> base, Options options)
    : base_(std::move(base)), options_(options) {
  if (!base_) throw BuildError("boosting needs a base classifier");
  if (!base_->provides_proba())
    throw BuildError("boosting: base classifier must expose probabilities");
  if (options_.n < 1) throw ConfigError("boosting: n must be at least 1");
}

void Boosting::fit(const Dataset& d, std::uint64_t seed) {
  members_.clear();
  alphas_.clear();
  notes_.clear();

  std::vector<int> y = d.binary_labels();
  std::vector<double> w = d.weights;
  double total = 0.0;
  for (double v : w) total += v;
  if (!(total > 0.0)) throw SchemaError("boosting: total sample weight must be positive");
  for (double& v : w) v /= total;

  for (std::size_t t = 0; t < options_.n; ++t) {
    auto member = base_->clone_untrained();
    try {
      member->fit(d.with_weights(w), mix_seed(seed, t));
    } catch (const std::exception& e) {
      member_failed("boosting", t, e);
    }
    std::vector<int> pred = member->predict(d);
    double eps = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i)
      if (pred[i] != y[i]) eps += w[i];

    if (eps == 0.0) {
      if (members_.empty()) {
        members_.push_back(std::move(member));
        alphas_.push_back(1.0);
        notes_.push_back("round 0: perfect base estimator, stopping with one member");
      }
      break;
    }
    if (eps >= 0.5) {
      if (members_.empty()) {
        members_.push_back(std::move(member));
        alphas_.push_back(1.0);
        notes_.push_back("round 0: base no better than chance, keeping it anyway");
      }
      break;
    }

    double alpha = std::log((1.0 - eps) / eps);
    double boosted = std::exp(alpha);
    double sum = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
      if (pred[i] != y[i]) w[i] *= boosted;
      sum += w[i];
    }
    for (double& v : w) v /= sum;

    members_.push_back(std::move(member));
    alphas_.push_back(alpha);
  }
}

Matrix Boosting::predict_proba(const Dataset& d) const {
  if (members_.empty()) throw NotTrainedError("boosting: predict before fit");
  Matrix mean(d.n_rows(), 2);
  double alpha_total = 0.0;
  for (std::size_t t = 0; t < members_.size(); ++t) {
    Matrix p = members_[t]->predict_proba(d);
    for (std::size_t i = 0; i < p.rows; ++i) {
      mean(i, 0) += alphas_[t] * p(i, 0);
      mean(i, 1) += alphas_[t] * p(i, 1);
    }
    alpha_total += alphas_[t];
  }
  for (double& v : mean.data) v /= alpha_total;
  return mean;
}

json Boosting::describe() const {
  json j{{"kind", "boosting"}, {"n", options_.n}, {"base", base_->describe()}};
  j["trained_members"] = members_.size();
  if (!alphas_.empty()) j["alphas"] = alphas_;
  if (!notes_.empty()) j["notes"] = notes_;
  return j;
}

Voting::Voting(std::vector<std::unique_ptr<Classifier>> members, Mode mode)
    : protos_(std::move(members)), mode_(mode) {
  if (protos_.size() < 2) throw ConfigError("voting: at least 2 members required");
  for (const auto& m : protos_)
    if (!m) throw BuildError("voting: null member");
}

void Voting::fit(const Dataset& d, std::uint64_t seed) {
  members_.clear();
  for (std::size_t i = 0; i < protos_.size(); ++i) {
    auto member = protos_[i]->clone_untrained();
    try {
      member->fit(d, mix_seed(seed, i));
    } catch (const std::exception& e) {
      member_failed("voting", i, e);
    }
    members_.push_back(std::move(member));
  }
}

Matrix Voting::predict_proba(const Dataset& d) const {
  if (members_.empty()) throw NotTrainedError("voting: predict before fit");
  Matrix out(d.n_rows(), 2);
  if (mode_ == Mode::soft) {
    for (const auto& m : members_) {
      Matrix p = m->predict_proba(d);
      for (std::size_t i = 0; i < p.rows; ++i) {
        out(i, 0) += p(i, 0);
        out(i, 1) += p(i, 1);
      }
    }
  } else {
    for (const auto& m : members_) {
      std::vector<int> pred = m->predict(d);
      for (std::size_t i = 0; i < pred.size(); ++i) out(i, pred[i] ? 1 : 0) += 1.0;
    }
  }
  const double inv = 1.0 / static_cast<double>(members_.size());
  for (double& v : out.data) v *= inv;
  return out;
}

bool Voting::provides_proba() const {
  if (mode_ == Mode::hard) return false;
  const auto& list = members_.empty() ? protos_ : members_;
  return std::all_of(list.begin(), list.end(),
                     [](const auto& m) { return m->provides_proba(); });
}

json Voting::describe() const {
  json members = json::array();
  for (const auto& m : protos_) members.push_back(m->describe());
  return {{"kind", "voting"},
          {"mode", mode_ == Mode::soft ? "soft" : "hard"},
          {"members", std::move(members)},
          {"trained", !members_.empty()}};
}

std::unique_ptr<Classifier> Voting::clone_untrained() const {
  std::vector<std::unique_ptr<Classifier>> copies;
  copies.reserve(protos_.size());
  for (const auto& m : protos_) copies.push_back(m->clone_untrained());
  return std::make_unique<Voting>(std::move(copies), mode_);
}

Stacking::Stacking(std::vector<std::unique_ptr<Classifier>> members,
                   std::unique_ptr<Classifier> final_estimator, Options options,
                   FairnessInfo fi)
    : protos_(std::move(members)),
      final_proto_(std::move(final_estimator)),
      options_(options),
      fi_(std::move(fi)) {
  if (protos_.size() < 2) throw ConfigError("stacking: at least 2 members required");
  for (const auto& m : protos_) {
    if (!m) throw BuildError("stacking: null member");
    if (!m->provides_proba())
      throw BuildError("stacking: members must expose probabilities for meta-features");
  }
  if (!final_proto_) throw BuildError("stacking: final estimator required");
  if (options_.meta_folds < 2) throw ConfigError("stacking: meta_folds must be at least 2");
}

Dataset Stacking::meta_dataset(const Dataset& d, const Matrix& member_probas) const {
  Dataset meta;
  for (std::size_t i = 0; i < protos_.size(); ++i) {
    std::vector<double> p0(d.n_rows()), p1(d.n_rows());
    for (std::size_t r = 0; r < d.n_rows(); ++r) {
      p0[r] = member_probas(r, 2 * i);
      p1[r] = member_probas(r, 2 * i + 1);
    }
    meta.names.push_back("m" + std::to_string(i) + "_p0");
    meta.cols.push_back(Column::numeric_col(std::move(p0)));
    meta.names.push_back("m" + std::to_string(i) + "_p1");
    meta.cols.push_back(Column::numeric_col(std::move(p1)));
  }
  if (options_.passthrough) {
    for (std::size_t c = 0; c < d.n_cols(); ++c) {
      meta.names.push_back(d.names[c]);
      meta.cols.push_back(d.cols[c]);
    }
  }
  meta.labels = d.labels;
  meta.weights = d.weights;
  return meta;
}

void Stacking::fit(const Dataset& d, std::uint64_t seed) {
  if (options_.passthrough && d.n_cols() == 0)
    throw ConfigError("stacking: passthrough requires original features");

  // leak-free meta-features from out-of-fold member predictions
  Matrix oof(d.n_rows(), 2 * protos_.size());
  KFoldResult kf = stratified_kfold(d, fi_, options_.meta_folds, mix_seed(seed, 0, 1));
  for (std::size_t f = 0; f < kf.folds.size(); ++f) {
    const FoldSplit& fold = kf.folds[f];
    if (fold.test.empty()) continue;
    Dataset train = d.subset(fold.train);
    Dataset test = d.subset(fold.test);
    for (std::size_t i = 0; i < protos_.size(); ++i) {
      auto member = protos_[i]->clone_untrained();
      try {
        member->fit(train, mix_seed(seed, i, f + 2));
      } catch (const std::exception& e) {
        member_failed("stacking (out-of-fold)", i, e);
      }
      Matrix p = member->predict_proba(test);
      for (std::size_t r = 0; r < fold.test.size(); ++r) {
        oof(fold.test[r], 2 * i) = p(r, 0);
        oof(fold.test[r], 2 * i + 1) = p(r, 1);
      }
    }
  }

  final_ = final_proto_->clone_untrained();
  try {
    final_->fit(meta_dataset(d, oof), mix_seed(seed, 0, 0, 1));
  } catch (const std::exception& e) {
    member_failed("stacking (final estimator)", 0, e);
  }

  // refit members on the full data for inference
  members_.clear();
  for (std::size_t i = 0; i < protos_.size(); ++i) {
    auto member = protos_[i]->clone_untrained();
    try {
      member->fit(d, mix_seed(seed, i, 1));
    } catch (const std::exception& e) {
      member_failed("stacking", i, e);
    }
    members_.push_back(std::move(member));
  }
}

Matrix Stacking::predict_proba(const Dataset& d) const {
  if (members_.empty() || !final_) throw NotTrainedError("stacking: predict before fit");
  Matrix probas(d.n_rows(), 2 * members_.size());
  for (std::size_t i = 0; i < members_.size(); ++i) {
    Matrix p = members_[i]->predict_proba(d);
    for (std::size_t r = 0; r < d.n_rows(); ++r) {
      probas(r, 2 * i) = p(r, 0);
      probas(r, 2 * i + 1) = p(r, 1);
    }
  }
  return final_->predict_proba(meta_dataset(d, probas));
}

json Stacking::describe() const {
  json members = json::array();
  for (const auto& m : protos_) members.push_back(m->describe());
  return {{"kind", "stacking"},
          {"passthrough", options_.passthrough},
          {"meta_folds", options_.meta_folds},
          {"members", std::move(members)},
          {"final", final_proto_->describe()},
          {"trained", !members_.empty()}};
}

std::unique_ptr<Classifier> Stacking::clone_untrained() const {
  std::vector<std::unique_ptr<Classifier>> copies;
  copies.reserve(protos_.size());
  for (const auto& m : protos_) copies.push_back(m->clone_untrained());
  return std::make_unique<Stacking>(std::move(copies), final_proto_->clone_untrained(),
                                    options_, fi_);
}

}  // namespace fairens
