#pragma once
#include <string>
#include <vector>

#include "fairens/metrics.hpp"
#include "fairens/plan.hpp"
#include "fairens/records.hpp"

namespace fairens {

/// One plan's standardized position within a (dataset, metric) group:
/// outcome is the min-max scaled symmetrized mean, volatility the scaled
/// standard deviation, both in [0, 1].
struct StandardizedScore {
  std::string dataset;
  MitigationPlan plan;
  MetricKind metric = MetricKind::accuracy;
  double outcome = 0.0;
  double volatility = 0.0;
  /// Set when the group's scaling range collapsed and every value was
  /// mapped to 0.
  bool degenerate_outcome = false;
  bool degenerate_volatility = false;
};

struct StandardizeResult {
  std::vector<StandardizedScore> scores;
  /// "<dataset>/<metric>/outcome" or ".../volatility" per collapsed group.
  std::vector<std::string> degenerate_groups;
};

/// Cross-dataset standardization of one metric: per dataset, trivial and
/// undefined values are dropped (an undefined or zero disparate impact,
/// a zero F1, an undefined resource reading), survivors symmetrized, then
/// each plan's mean and sample standard deviation are min-max scaled over
/// the dataset's plans. Plans with no surviving values are omitted.
StandardizeResult standardize(const std::vector<ExperimentRecord>& records, MetricKind kind);

/// The value-level drop rule behind standardize, exposed for oracles.
bool trivial_metric_value(MetricValue v, MetricKind kind);

struct AggregateRow {
  std::string label;
  /// Column name -> averaged score; undefined when the cell's group is
  /// empty. Column order lives in the table.
  std::map<std::string, MetricValue> cells;
};

struct AggregateTable {
  std::string name;
  std::vector<std::string> columns;
  std::vector<AggregateRow> rows;

  nlohmann::json to_json() const;
  std::string to_csv() const;
  /// Column-aligned monospaced rendering.
  std::string to_text() const;
};

enum class RqTable {
  rq1,                 // disparate impact by ensemble x mitigator kind
  rq2,                 // F1 by ensemble x mitigator kind
  rq3_homogeneous,     // DI + SPD for sized ensembles by (n, level), pre-mitigated
  rq3_heterogeneous,   // DI for voting/stacking configurations, pre-mitigated
  rq3_supplement,      // AOD + EOD in the rq3_homogeneous shape
};

std::string rq_table_name(RqTable which);

/// Research-question aggregation: averages standardized scores over every
/// (dataset, plan) pair in each row group. Rows whose groups are all
/// empty are omitted.
AggregateTable aggregate_rq(const std::vector<StandardizedScore>& scores, RqTable which);

struct ResourcePoint {
  int n = 0;
  MetricValue time_outcome = MetricValue::undefined();
  MetricValue memory_outcome = MetricValue::undefined();
};

struct ResourceSeries {
  MitigationLevel level = MitigationLevel::estimator;
  std::vector<ResourcePoint> points;
};

struct ResourceCurves {
  std::vector<ResourceSeries> series;
  /// Set when one mitigation level has no records at all.
  bool partial = false;

  nlohmann::json to_json() const;
  std::string to_csv() const;
};

/// Standardized time and memory versus bagging size, one series per
/// mitigation level, over pre-estimator-mitigated bagging records.
ResourceCurves resource_curves(const std::vector<ExperimentRecord>& records);

}  // namespace fairens
