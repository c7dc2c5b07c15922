#include "fairens/synthetic.hpp"

#include <cmath>

#include "fairens/rng.hpp"

namespace fairens {

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// Find the intercept c so that mean(sigmoid(score + c)) over the group hits `rate`.
double calibrate_intercept(const std::vector<double>& scores, double rate) {
  double lo = -20.0, hi = 20.0;
  for (int it = 0; it < 80; ++it) {
    double mid = 0.5 * (lo + hi);
    double mean = 0.0;
    for (double s : scores) mean += sigmoid(s + mid);
    mean /= static_cast<double>(scores.size());
    if (mean < rate) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

SyntheticDataset make_planted_bias(const SyntheticSpec& spec) {
  if (spec.rows < 8) throw ConfigError("make_planted_bias: need at least 8 rows");
  if (spec.features < 1) throw ConfigError("make_planted_bias: need at least 1 feature");
  if (spec.target_di <= 0.0) throw ConfigError("make_planted_bias: target_di must be positive");

  Rng rng(spec.seed);
  const std::size_t n = spec.rows;
  const std::size_t d = spec.features;

  std::vector<std::vector<double>> x(d, std::vector<double>(n));
  for (std::size_t j = 0; j < d; ++j)
    for (std::size_t i = 0; i < n; ++i) x[j][i] = rng.normal();

  std::vector<double> grp(n);
  // deterministic group sizes: first ceil(frac*n) rows privileged, then shuffled
  std::size_t n_priv = static_cast<std::size_t>(std::ceil(spec.privileged_fraction * n));
  if (n_priv == 0) n_priv = 1;
  if (n_priv >= n) n_priv = n - 1;
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  rng.shuffle(order);
  for (std::size_t i = 0; i < n; ++i) grp[order[i]] = i < n_priv ? 1.0 : 0.0;

  // alternating-sign weights keep the labels learnable from the features
  std::vector<double> w(d);
  for (std::size_t j = 0; j < d; ++j) w[j] = (j % 2 == 0 ? 1.0 : -1.0) * (1.0 + 0.25 * j);

  std::vector<double> score(n, 0.0);
  for (std::size_t j = 0; j < d; ++j)
    for (std::size_t i = 0; i < n; ++i) score[i] += w[j] * x[j][i];

  std::vector<double> score_priv, score_unpriv;
  for (std::size_t i = 0; i < n; ++i)
    (grp[i] == 1.0 ? score_priv : score_unpriv).push_back(score[i]);

  double rate_p = spec.favorable_rate_privileged;
  double rate_u = spec.target_di * rate_p;
  if (rate_u >= 1.0) throw ConfigError("make_planted_bias: target rates exceed 1");
  double cp = calibrate_intercept(score_priv, rate_p);
  double cu = calibrate_intercept(score_unpriv, rate_u);

  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    double c = grp[i] == 1.0 ? cp : cu;
    y[i] = rng.uniform01() < sigmoid(score[i] + c) ? 1.0 : 0.0;
  }

  SyntheticDataset out;
  for (std::size_t j = 0; j < d; ++j) {
    out.data.names.push_back("x" + std::to_string(j));
    out.data.cols.push_back(Column::numeric_col(std::move(x[j])));
  }
  out.data.names.push_back("grp");
  out.data.cols.push_back(Column::numeric_col(std::move(grp)));
  out.data.labels = Column::numeric_col(std::move(y));
  out.data.weights.assign(n, 1.0);
  out.data.check();

  out.fairness_info.favorable_labels = {Cell{1.0}};
  out.fairness_info.protected_attributes = {{"grp", {GroupValue{1.0}}}};
  return out;
}

}  // namespace fairens
