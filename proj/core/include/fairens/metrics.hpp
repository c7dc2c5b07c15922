#pragma once
#include <map>
#include <span>
#include <string>
#include <vector>

#include "fairens/dataset.hpp"
#include "fairens/metric_value.hpp"

namespace fairens {

enum class MetricKind {
  accuracy,
  precision,
  recall,
  f1,
  disparate_impact,
  statistical_parity_difference,
  equal_opportunity_difference,
  average_odds_difference,
  time_seconds,
  memory_mb,
};

/// How a metric is folded onto a common "closer is better" region.
enum class MetricFamily { predictive, ratio, difference, resource };

MetricFamily metric_family(MetricKind k);
std::string metric_name(MetricKind k);
MetricKind metric_from_name(const std::string& name);

/// The eight model-quality metrics (excludes time and memory).
std::span<const MetricKind> performance_metrics();
/// All metric kinds recorded by the harness.
std::span<const MetricKind> all_metrics();

/// Weighted confusion counts for one group.
struct Confusion {
  double tp = 0, fp = 0, tn = 0, fn = 0;
  double n() const { return tp + fp + tn + fn; }
  /// Predicted-favorable rate (selection rate).
  double rate() const { return n() > 0 ? (tp + fp) / n() : 0.0; }
};

/// Per-partition confusion counts.
struct GroupConfusion {
  Confusion priv;
  Confusion unpriv;
  Confusion total() const;
};

/// Tally weighted confusion cells per partition. y_true/y_pred are 0/1
/// with 1 = favorable.
GroupConfusion group_confusion(std::span<const int> y_true, std::span<const int> y_pred,
                               const GroupEncoding& enc, std::span<const double> weights);

/// Group fairness metrics in the unprivileged-minus-privileged (or
/// unprivileged-over-privileged) orientation. Undefined results (zero
/// denominators) return the tagged undefined value.
MetricValue fairness_metric(const GroupConfusion& gc, MetricKind kind);

/// Accuracy, precision, recall and F1 on the favorable class.
/// Conventions: precision and recall are 0 when their denominator is 0;
/// F1 is 0 when precision + recall is 0.
MetricValue predictive_metric(const GroupConfusion& gc, MetricKind kind);

/// Fold a metric value onto the common region: ratio metrics map to
/// min(v, 1/v), difference metrics to |v|, others are unchanged.
/// Undefined values stay undefined. Idempotent.
MetricValue symmetrize(MetricValue v, MetricKind kind);

class Classifier;  // see classifier.hpp

/// Bound metric: computes one metric of a trained classifier on a test
/// dataset, binding groups through the fairness declaration.
class Scorer {
 public:
  Scorer(MetricKind kind, FairnessInfo fi) : kind_(kind), fi_(std::move(fi)) {}

  MetricValue operator()(const Classifier& model, const Dataset& test) const;

  /// Score precomputed predictions instead of a model.
  MetricValue score_predictions(std::span<const int> y_pred, const Dataset& test) const;

  MetricKind kind() const { return kind_; }

 private:
  MetricKind kind_;
  FairnessInfo fi_;
};

Scorer make_scorer(MetricKind kind, const FairnessInfo& fi);

/// JSON report of every performance metric for one prediction set.
nlohmann::json metric_report(std::span<const int> y_true, std::span<const int> y_pred,
                             const GroupEncoding& enc, std::span<const double> weights);

}  // namespace fairens
