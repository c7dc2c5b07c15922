#include "fairens/decision_tree.hpp"

#include <algorithm>
#include <cmath>

namespace fairens {

using nlohmann::json;

namespace {

double impurity(double w0, double w1, SplitCriterion crit) {
  double W = w0 + w1;
  if (W <= 0.0) return 0.0;
  double p0 = w0 / W, p1 = w1 / W;
  if (crit == SplitCriterion::gini) return 1.0 - p0 * p0 - p1 * p1;
  double h = 0.0;
  if (p0 > 0.0) h -= p0 * std::log2(p0);
  if (p1 > 0.0) h -= p1 * std::log2(p1);
  return h;
}

}  // namespace

void DecisionTree::fit(const Matrix& X, const std::vector<int>& y,
                       std::span<const double> weights) {
  check_fit_inputs(X, y, weights);
  nodes_.clear();
  fit_notes_.clear();
  n_features_ = X.cols;
  detect_single_class(y);
  std::vector<std::size_t> rows(X.rows);
  for (std::size_t i = 0; i < X.rows; ++i) rows[i] = i;
  build(X, y, weights, rows, 0);
  trained_ = true;
}

std::size_t DecisionTree::build(const Matrix& X, const std::vector<int>& y,
                                std::span<const double> w, std::vector<std::size_t>& rows,
                                int depth) {
  double w0 = 0.0, w1 = 0.0;
  for (auto r : rows) (y[r] == 1 ? w1 : w0) += w[r];
  const double W = w0 + w1;

  Node node;
  node.p0 = W > 0.0 ? w0 / W : 0.5;
  node.p1 = W > 0.0 ? w1 / W : 0.5;

  bool stop = (w0 == 0.0 || w1 == 0.0) ||
              (params_.max_depth >= 0 && depth >= params_.max_depth) ||
              rows.size() < 2 * params_.min_samples_leaf;

  int best_feature = -1;
  double best_threshold = 0.0;
  double best_child_impurity = 0.0;
  if (!stop) {
    const double parent_imp = impurity(w0, w1, params_.criterion);
    double best_improvement = 0.0;
    std::vector<std::pair<double, std::size_t>> order;
    order.reserve(rows.size());
    for (std::size_t f = 0; f < X.cols; ++f) {
      order.clear();
      for (auto r : rows) order.emplace_back(X(r, f), r);
      std::sort(order.begin(), order.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
      double lw0 = 0.0, lw1 = 0.0;
      for (std::size_t i = 0; i + 1 < order.size(); ++i) {
        std::size_t r = order[i].second;
        (y[r] == 1 ? lw1 : lw0) += w[r];
        if (order[i].first == order[i + 1].first) continue;
        std::size_t left_n = i + 1, right_n = order.size() - left_n;
        if (left_n < params_.min_samples_leaf || right_n < params_.min_samples_leaf) continue;
        double rw0 = w0 - lw0, rw1 = w1 - lw1;
        double child = ((lw0 + lw1) / W) * impurity(lw0, lw1, params_.criterion) +
                       ((rw0 + rw1) / W) * impurity(rw0, rw1, params_.criterion);
        double improvement = parent_imp - child;
        // strict > keeps the earliest (lowest feature, lowest threshold) best
        if (improvement > best_improvement + 1e-15 && improvement > 0.0) {
          best_improvement = improvement;
          best_feature = static_cast<int>(f);
          best_threshold = 0.5 * (order[i].first + order[i + 1].first);
          best_child_impurity = child;
        }
      }
    }
    (void)best_child_impurity;
    if (best_feature < 0) stop = true;
  }

  std::size_t idx = nodes_.size();
  nodes_.push_back(node);
  if (stop) return idx;

  std::vector<std::size_t> left_rows, right_rows;
  for (auto r : rows)
    (X(r, static_cast<std::size_t>(best_feature)) <= best_threshold ? left_rows : right_rows)
        .push_back(r);
  rows.clear();
  rows.shrink_to_fit();

  nodes_[idx].feature = best_feature;
  nodes_[idx].threshold = best_threshold;
  std::size_t li = build(X, y, w, left_rows, depth + 1);
  nodes_[idx].left = static_cast<int>(li);
  std::size_t ri = build(X, y, w, right_rows, depth + 1);
  nodes_[idx].right = static_cast<int>(ri);
  return idx;
}

Matrix DecisionTree::predict_proba(const Matrix& X) const {
  require_trained();
  if (X.cols != n_features_)
    throw SchemaError("decision_tree: expected " + std::to_string(n_features_) +
                      " features, got " + std::to_string(X.cols));
  Matrix out(X.rows, 2);
  for (std::size_t i = 0; i < X.rows; ++i) {
    std::size_t cur = 0;
    while (nodes_[cur].feature >= 0) {
      const Node& nd = nodes_[cur];
      cur = X(i, static_cast<std::size_t>(nd.feature)) <= nd.threshold
                ? static_cast<std::size_t>(nd.left)
                : static_cast<std::size_t>(nd.right);
    }
    out(i, 0) = nodes_[cur].p0;
    out(i, 1) = nodes_[cur].p1;
  }
  return out;
}

json DecisionTree::to_json() const {
  require_trained();
  json nodes = json::array();
  for (const auto& nd : nodes_)
    nodes.push_back({{"feature", nd.feature},
                     {"threshold", nd.threshold},
                     {"left", nd.left},
                     {"right", nd.right},
                     {"p0", nd.p0},
                     {"p1", nd.p1}});
  return json{{"version", 1},
              {"kind", "decision_tree"},
              {"criterion", params_.criterion == SplitCriterion::gini ? "gini" : "entropy"},
              {"max_depth", params_.max_depth},
              {"min_samples_leaf", params_.min_samples_leaf},
              {"n_features", n_features_},
              {"nodes", nodes}};
}

std::unique_ptr<DecisionTree> DecisionTree::from_json(const json& j) {
  Params p;
  p.criterion =
      j.at("criterion").get<std::string>() == "entropy" ? SplitCriterion::entropy
                                                        : SplitCriterion::gini;
  p.max_depth = j.at("max_depth").get<int>();
  p.min_samples_leaf = j.at("min_samples_leaf").get<std::size_t>();
  auto tree = std::make_unique<DecisionTree>(p);
  tree->n_features_ = j.at("n_features").get<std::size_t>();
  for (const auto& nj : j.at("nodes")) {
    Node nd;
    nd.feature = nj.at("feature").get<int>();
    nd.threshold = nj.at("threshold").get<double>();
    nd.left = nj.at("left").get<int>();
    nd.right = nj.at("right").get<int>();
    nd.p0 = nj.at("p0").get<double>();
    nd.p1 = nj.at("p1").get<double>();
    tree->nodes_.push_back(nd);
  }
  if (tree->nodes_.empty()) throw ParseError("decision_tree: empty node list");
  tree->trained_ = true;
  return tree;
}

}  // namespace fairens
