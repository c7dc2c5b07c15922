#pragma once
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "fairens/dataset.hpp"
#include "fairens/pipeline.hpp"
#include "fairens/plan.hpp"
#include "fairens/records.hpp"

namespace fairens {

struct CvOptions {
  int trials = 5;
  int folds = 3;
  std::uint64_t base_seed = 42;
  bool record_predictions = false;
  /// Demo mode: leave wall time and peak memory undefined so repeated
  /// runs produce byte-identical record files.
  bool deterministic_resources = false;
};

/// One trial of stratified k-fold cross validation: the split is seeded
/// with base_seed + trial, each fold's fit with a value derived from
/// (base_seed, trial, fold). Pipeline failures become records with the
/// failure flag; the trial continues.
std::vector<ExperimentRecord> run_cv_trial(const Dataset& d, const FairnessInfo& fi,
                                           const MitigationPlan& plan, const Roster& roster,
                                           const std::string& dataset_id, int trial,
                                           const CvOptions& opt);

/// All trials back to back: trials x folds records.
std::vector<ExperimentRecord> run_cv(const Dataset& d, const FairnessInfo& fi,
                                     const MitigationPlan& plan, const Roster& roster,
                                     const std::string& dataset_id, const CvOptions& opt);

struct SelectionPolicy {
  double di_low = 0.8;
  double di_high = 1.25;
  /// Step-4 tie objective: precision when set (COMPAS-style datasets),
  /// recall otherwise.
  bool prefer_precision = false;
};

/// One mitigator configuration with its cross-validation records.
struct GridCandidate {
  MitigatorConfig config;
  std::vector<ExperimentRecord> records;
};

struct SelectionResult {
  MitigatorConfig chosen;
  bool relaxed = false;
  /// Filters dropped by the relaxation ladder, in order (3, then 1, then 2).
  std::vector<int> dropped_filters;
  /// Per-candidate means, filter verdicts and the final ranking.
  nlohmann::json trace;
};

/// The four-step filter/selection over one (dataset, mitigator kind)
/// group: (1) mean disparate impact inside [di_low, di_high]; (2) mean
/// precision > 0; (3) mean F1 above both the mean and the median of the
/// surviving candidates' mean F1s; (4) highest mean precision or recall
/// per the policy, ties broken by canonical config order. When a filter
/// leaves nothing, it is dropped per the ladder and the result flagged.
SelectionResult grid_select(const std::vector<GridCandidate>& candidates,
                            const SelectionPolicy& policy);

/// Shipped default hyperparameter grids for step 1, per mitigator kind.
std::vector<MitigatorConfig> default_candidate_grid(MitigatorKind kind);

struct GridOptions {
  std::vector<int> bagging_sizes = {1, 5, 10, 50, 100};
  std::vector<int> boosting_sizes = {1, 10, 50, 100, 500};

  nlohmann::json to_json() const;
  static GridOptions from_json(const nlohmann::json& j);
};

/// The main experiment grid for one dataset: every feasible combination
/// of ensemble, mitigator kind, mitigation level and ensemble size, each
/// carrying the step-1 selected configuration of its mitigator kind.
/// Every returned plan passes validate_plan.
std::vector<MitigationPlan> enumerate_plans(
    const std::map<MitigatorKind, MitigatorConfig>& selected, const GridOptions& grid = {});

/// One dataset prepared for the harness.
struct DatasetEntry {
  std::string id;
  Dataset data;
  FairnessInfo fi;
  Roster roster;
  std::map<MitigatorKind, MitigatorConfig> selected;
};

struct MainGridOptions {
  CvOptions cv;
  GridOptions grid;
  int jobs = 1;
};

/// Runs the full Cartesian grid over all datasets. (dataset, plan, trial)
/// units are independent jobs on a bounded pool; records are appended in
/// enumeration order regardless of scheduling, so outputs are identical
/// for any job count. Units whose records are already stored are skipped.
/// Returns the number of records appended.
std::size_t run_main_grid(const std::vector<DatasetEntry>& datasets, RecordStore& store,
                          const MainGridOptions& opt,
                          const std::function<void(const std::string&)>& log = {});

/// Step 1 for one (dataset, mitigator kind): cross-validates every
/// candidate configuration on the bare mitigated estimator and applies
/// grid_select. Candidate records are appended to `store` when given.
SelectionResult run_grid_search(const DatasetEntry& entry, MitigatorKind kind,
                                const std::vector<MitigatorConfig>& grid,
                                const SelectionPolicy& policy, const CvOptions& opt,
                                RecordStore* store = nullptr);

}  // namespace fairens
