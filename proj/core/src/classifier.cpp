#include "fairens/classifier.hpp"

namespace fairens {

using nlohmann::json;

std::vector<int> Classifier::predict(const Dataset& d) const {
  Matrix p = predict_proba(d);
  std::vector<int> out(p.rows);
  for (std::size_t i = 0; i < p.rows; ++i) out[i] = p(i, 1) >= p(i, 0) ? 1 : 0;
  return out;
}

LearnerClassifier::LearnerClassifier(std::unique_ptr<Estimator> proto)
    : proto_(std::move(proto)) {
  if (!proto_) throw BuildError("learner classifier needs an estimator prototype");
}

void LearnerClassifier::fit(const Dataset& d, std::uint64_t) {
  Matrix X = d.feature_matrix();
  std::vector<int> y = d.binary_labels();
  fitted_ = proto_->clone_untrained();
  fitted_->fit(X, y, d.weights);
}

Matrix LearnerClassifier::predict_proba(const Dataset& d) const {
  if (!fitted_) throw NotTrainedError("learner classifier: predict before fit");
  return fitted_->predict_proba(d.feature_matrix());
}

json LearnerClassifier::describe() const {
  json j{{"kind", "learner"}, {"estimator", proto_->name()}};
  if (fitted_) j["model"] = fitted_->to_json();
  return j;
}

std::unique_ptr<Classifier> LearnerClassifier::clone_untrained() const {
  return std::make_unique<LearnerClassifier>(proto_->clone_untrained());
}

}  // namespace fairens
