#pragma once
#include <json.hpp>

namespace fairens {

/// A metric result that may be undefined (for example a disparate impact
/// ratio whose denominator is zero). Undefined values carry a tag instead
/// of NaN so they serialize cleanly and cannot be averaged by accident.
struct MetricValue {
  double value = 0.0;
  bool defined = true;

  static MetricValue undefined() { return {0.0, false}; }

  bool operator==(const MetricValue&) const = default;
};

inline void to_json(nlohmann::json& j, const MetricValue& v) {
  j = nlohmann::json{{"value", v.value}, {"defined", v.defined}};
}

inline void from_json(const nlohmann::json& j, MetricValue& v) {
  j.at("value").get_to(v.value);
  j.at("defined").get_to(v.defined);
}

}  // namespace fairens
