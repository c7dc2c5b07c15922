#pragma once
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <ostream>
#include <string>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "fairens/metric_value.hpp"
#include "fairens/metrics.hpp"
#include "fairens/plan.hpp"

namespace fairens {

/// One (dataset, plan, trial, fold) evaluation. Failed runs keep the
/// identifying fields, set `failed` and leave every metric undefined.
struct ExperimentRecord {
  std::string dataset;
  MitigationPlan plan;
  int trial = 0;
  int fold = 0;
  std::uint64_t seed = 0;
  std::map<std::string, MetricValue> metrics;
  MetricValue time_seconds = MetricValue::undefined();
  MetricValue memory_mb = MetricValue::undefined();
  bool failed = false;
  std::string error;
  std::vector<int> predictions;  // persisted only under the verification flag

  /// Resume identity: canonical JSON of (dataset, plan key, trial, fold).
  std::string key() const;
  static std::string make_key(const std::string& dataset, const std::string& plan_key,
                              int trial, int fold);

  /// Metric lookup routing time/memory to their dedicated fields.
  /// Unknown or absent entries come back undefined.
  MetricValue metric(MetricKind kind) const;

  nlohmann::json to_json() const;
  static ExperimentRecord from_json(const nlohmann::json& j);
};

/// Append-only JSON-lines store with resume keys. Appends are serialized
/// and deduplicated: a record whose key is already present is skipped, so
/// re-running a completed grid adds zero records.
class RecordStore {
 public:
  explicit RecordStore(std::filesystem::path path);

  bool contains(const std::string& key) const;

  /// Returns false (and writes nothing) when the key is already present.
  bool append(const ExperimentRecord& r);

  std::size_t size() const;
  const std::filesystem::path& path() const { return path_; }

  static std::vector<ExperimentRecord> load(const std::filesystem::path& path);

  /// Flattened CSV: one row per record, one column pair per metric kind.
  static void export_csv(const std::vector<ExperimentRecord>& records, std::ostream& out);

 private:
  std::filesystem::path path_;
  std::ofstream out_;
  mutable std::mutex mu_;
  std::unordered_set<std::string> keys_;
};

}  // namespace fairens
