#pragma once
#include <array>
#include <map>
#include <string>
#include <vector>

#include "fairens/analysis.hpp"

namespace fairens {

/// Dataset facts the guidance quadrants are keyed on.
struct DatasetMeta {
  std::string id;
  std::size_t rows = 0;
  MetricValue baseline_di = MetricValue::undefined();

  nlohmann::json to_json() const;
  static DatasetMeta from_json(const nlohmann::json& j);
};

struct GuidanceOptions {
  std::size_t large_rows_threshold = 8000;
  double very_unfair_di = 0.49;
  std::size_t top_k = 3;
};

struct GuidanceEntry {
  std::string notation;
  double score = 0.0;
};

struct GuidanceQuadrant {
  bool large = false;
  bool very_unfair = false;
  std::vector<std::string> datasets;
  /// Metric name -> best plans, direction-aware (a ratio or predictive
  /// outcome is maximized, difference and resource outcomes minimized,
  /// volatility always minimized).
  std::map<std::string, std::vector<GuidanceEntry>> top_outcome;
  std::map<std::string, std::vector<GuidanceEntry>> top_volatility;
};

struct GuidanceTree {
  GuidanceOptions options;
  /// Indexed by 2*large + very_unfair.
  std::array<GuidanceQuadrant, 4> quadrants;

  nlohmann::json to_json() const;
};

/// Distills standardized scores into per-quadrant recommendations:
/// per dataset, keep the plans ranked in the top 33% on both disparate
/// impact outcome and F1 outcome; bucket datasets into quadrants by
/// (rows > threshold, baseline DI < threshold); average each metric per
/// plan notation within the quadrant; report the best `top_k` per
/// (quadrant, metric). Ties break by notation order.
GuidanceTree build_guidance(const std::vector<StandardizedScore>& scores,
                            const std::vector<DatasetMeta>& meta,
                            const GuidanceOptions& opt = {});

/// The per-dataset survivor rule behind build_guidance, exposed for
/// oracles: notations of plans whose rank is <= ceil(0.33 * n) on both
/// target metrics. Ranks are by descending outcome, ties by notation.
std::vector<std::string> guidance_survivors(const std::vector<StandardizedScore>& scores,
                                            const std::string& dataset);

/// Graphviz rendering: a root size split, two unfairness splits and four
/// quadrant leaves listing the recommendations.
std::string emit_dot(const GuidanceTree& tree);

}  // namespace fairens
