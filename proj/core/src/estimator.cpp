#include "fairens/estimator.hpp"

#include "fairens/decision_tree.hpp"
#include "fairens/knn.hpp"
#include "fairens/logistic.hpp"
#include "fairens/naive_bayes.hpp"

namespace fairens {

std::vector<int> Estimator::predict(const Matrix& X) const {
  Matrix p = predict_proba(X);
  std::vector<int> out(p.rows);
  for (std::size_t i = 0; i < p.rows; ++i) out[i] = p(i, 1) >= p(i, 0) ? 1 : 0;
  return out;
}

void Estimator::check_fit_inputs(const Matrix& X, const std::vector<int>& y,
                                 std::span<const double> weights) const {
  if (X.rows == 0) throw SchemaError(name() + ": cannot fit on zero rows");
  if (y.size() != X.rows) throw SchemaError(name() + ": label count does not match rows");
  if (weights.size() != X.rows) throw SchemaError(name() + ": weight count does not match rows");
  for (int v : y)
    if (v != 0 && v != 1) throw SchemaError(name() + ": labels must be 0 or 1");
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw SchemaError(name() + ": weights must be non-negative");
    total += w;
  }
  if (total <= 0.0) throw SchemaError(name() + ": total weight must be positive");
}

bool Estimator::detect_single_class(const std::vector<int>& y) {
  bool has0 = false, has1 = false;
  for (int v : y) (v == 1 ? has1 : has0) = true;
  if (has0 && has1) {
    single_class_ = -1;
    return false;
  }
  single_class_ = has1 ? 1 : 0;
  fit_notes_.push_back(name() + ": single-class training labels, constant predictor");
  return true;
}

std::vector<double> uniform_weights(std::size_t n) { return std::vector<double>(n, 1.0); }

std::unique_ptr<Estimator> estimator_from_json(const nlohmann::json& j) {
  std::string kind = j.at("kind").get<std::string>();
  if (kind == "decision_tree") return DecisionTree::from_json(j);
  if (kind == "logistic_regression") return LogisticRegression::from_json(j);
  if (kind == "knn") return KNearestNeighbors::from_json(j);
  if (kind == "gaussian_nb") return NaiveBayesGaussian::from_json(j);
  throw ConfigError("estimator_from_json: unknown kind '" + kind + "'");
}

}  // namespace fairens
