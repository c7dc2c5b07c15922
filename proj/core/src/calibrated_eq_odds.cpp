#include "fairens/calibrated_eq_odds.hpp"

#include <algorithm>
#include <cmath>

namespace fairens {

using nlohmann::json;

namespace {

struct GroupSoftCounts {
  double w_fav = 0.0, w_unfav = 0.0;
  double score_fav = 0.0, score_unfav = 0.0;  // weighted score sums per class

  double base_rate() const { return w_fav / (w_fav + w_unfav); }
  double gfpr() const { return score_unfav / w_unfav; }
  double gfnr() const { return (w_fav - score_fav) / w_fav; }
};

}  // namespace

CalibratedEqOdds::CalibratedEqOdds(FairnessInfo fi, Constraint constraint)
    : fi_(std::move(fi)), constraint_(constraint) {}

CalibratedEqOdds::Constraint CalibratedEqOdds::constraint_from_name(const std::string& name) {
  if (name == "fpr") return Constraint::fpr;
  if (name == "fnr") return Constraint::fnr;
  if (name == "weighted") return Constraint::weighted;
  throw ConfigError("calibrated_eq_odds: unknown cost constraint '" + name +
                    "' (expected fpr, fnr, or weighted)");
}

std::string CalibratedEqOdds::constraint_name(Constraint c) {
  switch (c) {
    case Constraint::fpr: return "fpr";
    case Constraint::fnr: return "fnr";
    default: return "weighted";
  }
}

void CalibratedEqOdds::fit(std::span<const double> favorable_scores, const Dataset& holdout) {
  if (favorable_scores.size() != holdout.n_rows())
    throw SchemaError("calibrated_eq_odds: score count does not match holdout rows");
  GroupEncoding enc = bind_groups(holdout, fi_);

  GroupSoftCounts priv, unpriv;
  for (std::size_t i = 0; i < holdout.n_rows(); ++i) {
    double s = favorable_scores[i];
    if (!std::isfinite(s) || s < -1e-9 || s > 1.0 + 1e-9)
      throw SchemaError("calibrated_eq_odds: score outside [0, 1] at row " + std::to_string(i));
    s = std::clamp(s, 0.0, 1.0);
    GroupSoftCounts& g = enc.priv_mask[i] ? priv : unpriv;
    double w = holdout.weights[i];
    if (enc.fav_mask[i]) {
      g.w_fav += w;
      g.score_fav += w * s;
    } else {
      g.w_unfav += w;
      g.score_unfav += w * s;
    }
  }

  const double fp = constraint_ == Constraint::fnr ? 0.0 : 1.0;
  const double fn = constraint_ == Constraint::fpr ? 0.0 : 1.0;
  auto check_cells = [&](const GroupSoftCounts& g, const char* which) {
    if (fp != 0.0 && g.w_unfav <= 0.0)
      throw DegenerateGroupError(std::string("calibrated_eq_odds: ") + which +
                                 " group has no unfavorable rows in holdout");
    if (fn != 0.0 && g.w_fav <= 0.0)
      throw DegenerateGroupError(std::string("calibrated_eq_odds: ") + which +
                                 " group has no favorable rows in holdout");
    if (g.w_fav + g.w_unfav <= 0.0)
      throw DegenerateGroupError(std::string("calibrated_eq_odds: ") + which +
                                 " group has zero weight in holdout");
  };
  check_cells(priv, "privileged");
  check_cells(unpriv, "unprivileged");

  base_priv_ = priv.base_rate();
  base_unpriv_ = unpriv.base_rate();

  auto cost = [&](const GroupSoftCounts& g) {
    double br = g.base_rate();
    double c = 0.0;
    if (fp != 0.0) c += fp * g.gfpr() * (1.0 - br);
    if (fn != 0.0) c += fn * g.gfnr() * br;
    return c;
  };
  auto trivial_cost = [&](const GroupSoftCounts& g) {
    double br = g.base_rate();
    return (fp + fn) * br * (1.0 - br);
  };

  double cost_priv = cost(priv), cost_unpriv = cost(unpriv);
  mix_priv_ = mix_unpriv_ = 0.0;
  const bool priv_is_lower = cost_priv < cost_unpriv;
  double low = priv_is_lower ? cost_priv : cost_unpriv;
  double high = priv_is_lower ? cost_unpriv : cost_priv;
  double trivial = trivial_cost(priv_is_lower ? priv : unpriv);
  double p;
  if (high == low) {
    p = 0.0;
  } else if (trivial - low <= 0.0) {
    p = 1.0;  // even full mixing cannot reach the other cost
  } else {
    p = std::clamp((high - low) / (trivial - low), 0.0, 1.0);
  }
  (priv_is_lower ? mix_priv_ : mix_unpriv_) = p;
  fitted_ = true;
}

std::vector<double> CalibratedEqOdds::adjust(std::span<const double> favorable_scores,
                                             const Dataset& d) const {
  if (!fitted_) throw NotTrainedError("calibrated_eq_odds: adjust before fit");
  if (favorable_scores.size() != d.n_rows())
    throw SchemaError("calibrated_eq_odds: score count does not match rows");
  GroupEncoding enc = bind_groups(d, fi_);
  std::vector<double> out(d.n_rows());
  for (std::size_t i = 0; i < d.n_rows(); ++i) {
    double p = enc.priv_mask[i] ? mix_priv_ : mix_unpriv_;
    double br = enc.priv_mask[i] ? base_priv_ : base_unpriv_;
    out[i] = (1.0 - p) * std::clamp(favorable_scores[i], 0.0, 1.0) + p * br;
  }
  return out;
}

json CalibratedEqOdds::describe() const {
  return {{"kind", "post_mitigator"},
          {"name", "calibrated_eq_odds"},
          {"cost_constraint", constraint_name(constraint_)},
          {"mix_rate_priv", mix_priv_},
          {"mix_rate_unpriv", mix_unpriv_},
          {"base_rate_priv", base_priv_},
          {"base_rate_unpriv", base_unpriv_},
          {"fitted", fitted_}};
}

}  // namespace fairens
