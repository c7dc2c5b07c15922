#include "fairens/metrics.hpp"

#include <array>
#include <cmath>

#include "fairens/classifier.hpp"

namespace fairens {

using nlohmann::json;

MetricFamily metric_family(MetricKind k) {
  switch (k) {
    case MetricKind::disparate_impact:
      return MetricFamily::ratio;
    case MetricKind::statistical_parity_difference:
    case MetricKind::equal_opportunity_difference:
    case MetricKind::average_odds_difference:
      return MetricFamily::difference;
    case MetricKind::time_seconds:
    case MetricKind::memory_mb:
      return MetricFamily::resource;
    default:
      return MetricFamily::predictive;
  }
}

std::string metric_name(MetricKind k) {
  switch (k) {
    case MetricKind::accuracy: return "accuracy";
    case MetricKind::precision: return "precision";
    case MetricKind::recall: return "recall";
    case MetricKind::f1: return "f1";
    case MetricKind::disparate_impact: return "disparate_impact";
    case MetricKind::statistical_parity_difference: return "statistical_parity_difference";
    case MetricKind::equal_opportunity_difference: return "equal_opportunity_difference";
    case MetricKind::average_odds_difference: return "average_odds_difference";
    case MetricKind::time_seconds: return "time_seconds";
    case MetricKind::memory_mb: return "memory_mb";
  }
  return "unknown";
}

MetricKind metric_from_name(const std::string& name) {
  for (MetricKind k : all_metrics())
    if (metric_name(k) == name) return k;
  throw ConfigError("unknown metric name '" + name + "'");
}

std::span<const MetricKind> performance_metrics() {
  static const std::array<MetricKind, 8> kinds = {
      MetricKind::accuracy,
      MetricKind::precision,
      MetricKind::recall,
      MetricKind::f1,
      MetricKind::disparate_impact,
      MetricKind::statistical_parity_difference,
      MetricKind::equal_opportunity_difference,
      MetricKind::average_odds_difference,
  };
  return kinds;
}

std::span<const MetricKind> all_metrics() {
  static const std::array<MetricKind, 10> kinds = {
      MetricKind::accuracy,
      MetricKind::precision,
      MetricKind::recall,
      MetricKind::f1,
      MetricKind::disparate_impact,
      MetricKind::statistical_parity_difference,
      MetricKind::equal_opportunity_difference,
      MetricKind::average_odds_difference,
      MetricKind::time_seconds,
      MetricKind::memory_mb,
  };
  return kinds;
}

Confusion GroupConfusion::total() const {
  Confusion t;
  t.tp = priv.tp + unpriv.tp;
  t.fp = priv.fp + unpriv.fp;
  t.tn = priv.tn + unpriv.tn;
  t.fn = priv.fn + unpriv.fn;
  return t;
}

GroupConfusion group_confusion(std::span<const int> y_true, std::span<const int> y_pred,
                               const GroupEncoding& enc, std::span<const double> weights) {
  const std::size_t n = y_true.size();
  if (y_pred.size() != n || enc.priv_mask.size() != n || weights.size() != n)
    throw SchemaError("group_confusion: input lengths disagree");
  GroupConfusion gc;
  for (std::size_t i = 0; i < n; ++i) {
    Confusion& c = enc.priv_mask[i] ? gc.priv : gc.unpriv;
    double w = weights[i];
    if (y_true[i] == 1) {
      if (y_pred[i] == 1) c.tp += w; else c.fn += w;
    } else {
      if (y_pred[i] == 1) c.fp += w; else c.tn += w;
    }
  }
  return gc;
}

namespace {

// rate with a tagged result when the denominator is zero
bool safe_rate(double num, double den, double& out) {
  if (den <= 0.0) return false;
  out = num / den;
  return true;
}

}  // namespace

MetricValue fairness_metric(const GroupConfusion& gc, MetricKind kind) {
  const Confusion& p = gc.priv;
  const Confusion& u = gc.unpriv;
  switch (kind) {
    case MetricKind::disparate_impact: {
      if (p.n() <= 0.0 || u.n() <= 0.0) return MetricValue::undefined();
      double rp = p.rate(), ru = u.rate();
      if (rp == 0.0) return MetricValue::undefined();
      return {ru / rp, true};
    }
    case MetricKind::statistical_parity_difference: {
      if (p.n() <= 0.0 || u.n() <= 0.0) return MetricValue::undefined();
      return {u.rate() - p.rate(), true};
    }
    case MetricKind::equal_opportunity_difference: {
      double tpr_p, tpr_u;
      if (!safe_rate(p.tp, p.tp + p.fn, tpr_p) || !safe_rate(u.tp, u.tp + u.fn, tpr_u))
        return MetricValue::undefined();
      return {tpr_u - tpr_p, true};
    }
    case MetricKind::average_odds_difference: {
      double tpr_p, tpr_u, fpr_p, fpr_u;
      if (!safe_rate(p.tp, p.tp + p.fn, tpr_p) || !safe_rate(u.tp, u.tp + u.fn, tpr_u) ||
          !safe_rate(p.fp, p.fp + p.tn, fpr_p) || !safe_rate(u.fp, u.fp + u.tn, fpr_u))
        return MetricValue::undefined();
      return {0.5 * ((fpr_u - fpr_p) + (tpr_u - tpr_p)), true};
    }
    default:
      throw ConfigError("fairness_metric: '" + metric_name(kind) + "' is not a fairness metric");
  }
}

MetricValue predictive_metric(const GroupConfusion& gc, MetricKind kind) {
  Confusion t = gc.total();
  double n = t.n();
  switch (kind) {
    case MetricKind::accuracy: {
      if (n <= 0.0) return MetricValue::undefined();
      return {(t.tp + t.tn) / n, true};
    }
    case MetricKind::precision: {
      double den = t.tp + t.fp;
      return {den > 0.0 ? t.tp / den : 0.0, true};
    }
    case MetricKind::recall: {
      double den = t.tp + t.fn;
      return {den > 0.0 ? t.tp / den : 0.0, true};
    }
    case MetricKind::f1: {
      double pden = t.tp + t.fp, rden = t.tp + t.fn;
      double prec = pden > 0.0 ? t.tp / pden : 0.0;
      double rec = rden > 0.0 ? t.tp / rden : 0.0;
      if (prec + rec == 0.0) return {0.0, true};
      return {2.0 * prec * rec / (prec + rec), true};
    }
    default:
      throw ConfigError("predictive_metric: '" + metric_name(kind) +
                        "' is not a predictive metric");
  }
}

MetricValue symmetrize(MetricValue v, MetricKind kind) {
  if (!v.defined) return v;
  switch (metric_family(kind)) {
    case MetricFamily::ratio:
      if (v.value > 1.0) v.value = 1.0 / v.value;
      return v;
    case MetricFamily::difference:
      v.value = std::fabs(v.value);
      return v;
    default:
      return v;
  }
}

MetricValue Scorer::score_predictions(std::span<const int> y_pred, const Dataset& test) const {
  GroupEncoding enc = bind_groups(test, fi_);
  std::vector<int> y_true(test.n_rows());
  for (std::size_t i = 0; i < test.n_rows(); ++i) y_true[i] = enc.fav_mask[i] ? 1 : 0;
  GroupConfusion gc = group_confusion(y_true, y_pred, enc, test.weights);
  if (metric_family(kind_) == MetricFamily::predictive) return predictive_metric(gc, kind_);
  if (metric_family(kind_) == MetricFamily::resource)
    throw ConfigError("scorer: resource metrics are measured by the harness, not scored");
  return fairness_metric(gc, kind_);
}

MetricValue Scorer::operator()(const Classifier& model, const Dataset& test) const {
  std::vector<int> y_pred = model.predict(test);
  return score_predictions(y_pred, test);
}

Scorer make_scorer(MetricKind kind, const FairnessInfo& fi) { return Scorer(kind, fi); }

json metric_report(std::span<const int> y_true, std::span<const int> y_pred,
                   const GroupEncoding& enc, std::span<const double> weights) {
  GroupConfusion gc = group_confusion(y_true, y_pred, enc, weights);
  json out = json::object();
  for (MetricKind k : performance_metrics()) {
    MetricValue v = metric_family(k) == MetricFamily::predictive ? predictive_metric(gc, k)
                                                                 : fairness_metric(gc, k);
    out[metric_name(k)] = v;
  }
  return out;
}

}  // namespace fairens
