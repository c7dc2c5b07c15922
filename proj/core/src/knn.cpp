#include "fairens/knn.hpp"

#include <algorithm>
#include <cmath>

namespace fairens {

using nlohmann::json;

void KNearestNeighbors::fit(const Matrix& X, const std::vector<int>& y,
                            std::span<const double> weights) {
  check_fit_inputs(X, y, weights);
  fit_notes_.clear();
  if (params_.k < 1) throw ConfigError("knn: k must be at least 1");
  detect_single_class(y);
  train_ = X;
  y_ = y;
  w_.assign(weights.begin(), weights.end());
  trained_ = true;
}

Matrix KNearestNeighbors::predict_proba(const Matrix& X) const {
  require_trained();
  if (X.cols != train_.cols)
    throw SchemaError("knn: expected " + std::to_string(train_.cols) + " features, got " +
                      std::to_string(X.cols));
  const std::size_t k = std::min(params_.k, train_.rows);
  Matrix out(X.rows, 2);
  std::vector<std::pair<double, std::size_t>> dist(train_.rows);
  for (std::size_t i = 0; i < X.rows; ++i) {
    for (std::size_t t = 0; t < train_.rows; ++t) {
      double s = 0.0;
      for (std::size_t j = 0; j < train_.cols; ++j) {
        double dlt = X(i, j) - train_(t, j);
        s += dlt * dlt;
      }
      dist[t] = {s, t};
    }
    // ties at the k-th position resolve toward the earlier training row
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());
    double v0 = 0.0, v1 = 0.0;
    for (std::size_t idx = 0; idx < k; ++idx) {
      std::size_t t = dist[idx].second;
      (y_[t] == 1 ? v1 : v0) += w_[t];
    }
    double total = v0 + v1;
    if (total <= 0.0) {
      out(i, 0) = 0.5;
      out(i, 1) = 0.5;
    } else {
      out(i, 0) = v0 / total;
      out(i, 1) = v1 / total;
    }
  }
  return out;
}

json KNearestNeighbors::to_json() const {
  require_trained();
  json rows = json::array();
  for (std::size_t i = 0; i < train_.rows; ++i) {
    json r = json::array();
    for (std::size_t j = 0; j < train_.cols; ++j) r.push_back(train_(i, j));
    rows.push_back(std::move(r));
  }
  return json{{"version", 1}, {"kind", "knn"},     {"k", params_.k},
              {"train", rows}, {"labels", y_},      {"weights", w_},
              {"n_features", train_.cols}};
}

std::unique_ptr<KNearestNeighbors> KNearestNeighbors::from_json(const json& j) {
  Params p;
  p.k = j.at("k").get<std::size_t>();
  auto m = std::make_unique<KNearestNeighbors>(p);
  const auto& rows = j.at("train");
  std::size_t cols = j.at("n_features").get<std::size_t>();
  m->train_ = Matrix(rows.size(), cols);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t c = 0; c < cols; ++c) m->train_(i, c) = rows[i][c].get<double>();
  m->y_ = j.at("labels").get<std::vector<int>>();
  m->w_ = j.at("weights").get<std::vector<double>>();
  m->trained_ = true;
  return m;
}

}  // namespace fairens
