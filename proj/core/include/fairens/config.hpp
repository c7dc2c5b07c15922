#pragma once
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "fairens/guidance.hpp"
#include "fairens/harness.hpp"
#include "fairens/openml.hpp"
#include "fairens/preprocess.hpp"
#include "fairens/synthetic.hpp"

namespace fairens {

struct SourceSpec {
  std::string kind;  // csv | arff | openml | synthetic | catalog
  std::string path;
  long openml_id = 0;
  SyntheticSpec synthetic;
};

struct DatasetSpec {
  std::string id;
  SourceSpec source;
  std::string target;
  std::optional<FairnessInfo> fairness;
  std::vector<std::string> drop;
  std::optional<bool> prefer_precision;
  std::map<MitigatorKind, MitigatorConfig> selected;
};

/// A run description, the single source of truth for every subcommand.
/// from_json validates against the published schema
/// (docs/run_config.schema.json) and reports violations with JSON
/// pointer paths.
struct RunConfig {
  std::filesystem::path output_dir = "out";
  std::uint64_t seed = 42;
  int trials = 5;
  int folds = 3;
  int jobs = 1;
  bool record_predictions = false;
  bool deterministic_resources = false;
  std::filesystem::path cache_dir = ".fairens-cache";
  Roster roster;
  GridOptions grid;
  SelectionPolicy selection;
  GuidanceOptions guidance;
  std::vector<DatasetSpec> datasets;

  static RunConfig from_json(const nlohmann::json& j);
  static RunConfig load(const std::filesystem::path& file);
  nlohmann::json to_json() const;
};

struct LoadedDataset {
  DatasetEntry entry;
  DatasetMeta meta;
  bool prefer_precision = false;
  PreprocessReport report;
};

/// Resolves every dataset spec: reads or fetches the raw table, applies
/// the preprocessing recipe and computes the post-preprocessing facts.
std::vector<LoadedDataset> load_datasets(const RunConfig& cfg, const HttpGet& http = {});

}  // namespace fairens
