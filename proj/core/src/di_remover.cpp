#include "fairens/di_remover.hpp"

#include <algorithm>
#include <cmath>

namespace fairens {

using nlohmann::json;

DisparateImpactRemover::DisparateImpactRemover(FairnessInfo fi, double repair_level)
    : fi_(std::move(fi)), lambda_(repair_level) {
  if (lambda_ < 0.0 || lambda_ > 1.0)
    throw ConfigError("di_remover: repair_level must be in [0, 1]");
}

double DisparateImpactRemover::GroupQuantiles::quantile(double u) const {
  const std::size_t m = sorted.size();
  const double inv = 1.0 / static_cast<double>(m);
  auto pos = [&](std::size_t i) { return (static_cast<double>(i) + 0.5) * inv; };
  if (u <= pos(0)) return sorted.front();
  if (u >= pos(m - 1)) return sorted.back();
  // u lies between pos(j) and pos(j+1) with j = floor(u*m - 0.5)
  double t = u * static_cast<double>(m) - 0.5;
  std::size_t j = static_cast<std::size_t>(t);
  if (j >= m - 1) j = m - 2;
  double frac = t - static_cast<double>(j);
  return sorted[j] + frac * (sorted[j + 1] - sorted[j]);
}

double DisparateImpactRemover::GroupQuantiles::cdf(double x) const {
  const std::size_t m = sorted.size();
  const double inv = 1.0 / static_cast<double>(m);
  auto pos = [&](std::size_t i) { return (static_cast<double>(i) + 0.5) * inv; };
  if (x <= sorted.front()) {
    if (x < sorted.front()) return pos(0);
    // fall through: equal to the minimum, average the tied positions
  }
  if (x > sorted.back()) return pos(m - 1);
  auto lo = std::lower_bound(sorted.begin(), sorted.end(), x);
  auto hi = std::upper_bound(sorted.begin(), sorted.end(), x);
  if (lo != hi) {
    // tied training values: average rank position
    std::size_t a = static_cast<std::size_t>(lo - sorted.begin());
    std::size_t b = static_cast<std::size_t>(hi - sorted.begin()) - 1;
    return 0.5 * (pos(a) + pos(b));
  }
  // strictly between two neighbors
  std::size_t j = static_cast<std::size_t>(lo - sorted.begin());
  if (j == 0) return pos(0);
  double x0 = sorted[j - 1], x1 = sorted[j];
  double frac = (x - x0) / (x1 - x0);
  return pos(j - 1) + frac * (pos(j) - pos(j - 1));
}

void DisparateImpactRemover::fit(const Dataset& d, std::uint64_t) {
  GroupEncoding enc = bind_groups(d, fi_);
  priv_.clear();
  unpriv_.clear();
  std::vector<std::string> protected_names;
  for (const auto& pa : fi_.protected_attributes) protected_names.push_back(pa.feature);

  for (std::size_t c = 0; c < d.n_cols(); ++c) {
    const std::string& nm = d.names[c];
    if (std::find(protected_names.begin(), protected_names.end(), nm) != protected_names.end())
      continue;
    if (d.cols[c].kind != ColumnKind::numeric)
      throw SchemaError("di_remover: feature '" + nm + "' is categorical; preprocess first");
    GroupQuantiles gp, gu;
    for (std::size_t i = 0; i < d.n_rows(); ++i) {
      double v = d.cols[c].num[i];
      if (is_missing_numeric(v))
        throw SchemaError("di_remover: feature '" + nm + "' has missing values");
      (enc.priv_mask[i] ? gp : gu).sorted.push_back(v);
    }
    std::sort(gp.sorted.begin(), gp.sorted.end());
    std::sort(gu.sorted.begin(), gu.sorted.end());
    priv_[nm] = std::move(gp);
    unpriv_[nm] = std::move(gu);
  }
  fitted_ = true;
}

Dataset DisparateImpactRemover::transform(const Dataset& d) const {
  if (!fitted_) throw NotTrainedError("di_remover: transform before fit");
  GroupEncoding enc = bind_groups(d, fi_);
  Dataset out = d;
  for (std::size_t c = 0; c < d.n_cols(); ++c) {
    const std::string& nm = d.names[c];
    auto itp = priv_.find(nm);
    if (itp == priv_.end()) continue;  // protected or unseen column
    const GroupQuantiles& qp = itp->second;
    const GroupQuantiles& qu = unpriv_.at(nm);
    for (std::size_t i = 0; i < d.n_rows(); ++i) {
      double x = d.cols[c].num[i];
      const GroupQuantiles& own = enc.priv_mask[i] ? qp : qu;
      double u = own.cdf(x);
      double target = 0.5 * (qp.quantile(u) + qu.quantile(u));
      out.cols[c].num[i] = (1.0 - lambda_) * x + lambda_ * target;
    }
  }
  return out;
}

json DisparateImpactRemover::describe() const {
  return {{"kind", "pre_mitigator"},
          {"name", "di_remover"},
          {"repair_level", lambda_},
          {"fitted", fitted_}};
}

}  // namespace fairens
