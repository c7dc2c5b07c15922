#include "fairens/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <mutex>
#include <optional>
#include <thread>

#include "fairens/memtrack.hpp"
#include "fairens/rng.hpp"
#include "fairens/splits.hpp"

namespace fairens {

using nlohmann::json;

namespace {

ExperimentRecord blank_record(const std::string& dataset_id, const MitigationPlan& plan,
                              int trial, int fold, std::uint64_t base_seed) {
  ExperimentRecord rec;
  rec.dataset = dataset_id;
  rec.plan = plan;
  rec.trial = trial;
  rec.fold = fold;
  rec.seed = mix_seed(base_seed, static_cast<std::uint64_t>(trial),
                      static_cast<std::uint64_t>(fold));
  return rec;
}

}  // namespace

std::vector<ExperimentRecord> run_cv_trial(const Dataset& d, const FairnessInfo& fi,
                                           const MitigationPlan& plan, const Roster& roster,
                                           const std::string& dataset_id, int trial,
                                           const CvOptions& opt) {
  if (opt.folds < 2) throw ConfigError("cross validation needs at least 2 folds");
  if (opt.trials < 1) throw ConfigError("cross validation needs at least 1 trial");

  std::vector<ExperimentRecord> out;
  out.reserve(static_cast<std::size_t>(opt.folds));

  KFoldResult kf;
  try {
    kf = stratified_kfold(d, fi, static_cast<std::size_t>(opt.folds),
                          opt.base_seed + static_cast<std::uint64_t>(trial));
  } catch (const std::exception& e) {
    for (int f = 0; f < opt.folds; ++f) {
      ExperimentRecord rec = blank_record(dataset_id, plan, trial, f, opt.base_seed);
      rec.failed = true;
      rec.error = e.what();
      out.push_back(std::move(rec));
    }
    return out;
  }

  for (int f = 0; f < opt.folds; ++f) {
    ExperimentRecord rec = blank_record(dataset_id, plan, trial, f, opt.base_seed);
    try {
      Dataset train = d.subset(kf.folds[static_cast<std::size_t>(f)].train);
      Dataset test = d.subset(kf.folds[static_cast<std::size_t>(f)].test);
      Pipeline pipeline = build_pipeline(plan, roster, fi);

      memtrack::ScopedWindow window;
      auto t0 = std::chrono::steady_clock::now();
      pipeline.fit(train, rec.seed);
      std::vector<int> preds = pipeline.predict(test);
      auto t1 = std::chrono::steady_clock::now();

      if (!opt.deterministic_resources) {
        rec.time_seconds = {std::chrono::duration<double>(t1 - t0).count(), true};
        if (memtrack::available())
          rec.memory_mb = {static_cast<double>(window.peak_bytes()) / (1024.0 * 1024.0), true};
      }

      GroupEncoding enc = bind_groups(test, fi);
      json report = metric_report(test.binary_labels(), preds, enc, test.weights);
      for (const auto& item : report.items())
        rec.metrics[item.key()] = item.value().get<MetricValue>();
      if (opt.record_predictions) rec.predictions = std::move(preds);
    } catch (const std::exception& e) {
      rec.failed = true;
      rec.error = e.what();
      rec.metrics.clear();
      rec.time_seconds = MetricValue::undefined();
      rec.memory_mb = MetricValue::undefined();
      rec.predictions.clear();
    }
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<ExperimentRecord> run_cv(const Dataset& d, const FairnessInfo& fi,
                                     const MitigationPlan& plan, const Roster& roster,
                                     const std::string& dataset_id, const CvOptions& opt) {
  std::vector<ExperimentRecord> out;
  out.reserve(static_cast<std::size_t>(opt.trials * opt.folds));
  for (int t = 0; t < opt.trials; ++t) {
    auto trial = run_cv_trial(d, fi, plan, roster, dataset_id, t, opt);
    out.insert(out.end(), std::make_move_iterator(trial.begin()),
               std::make_move_iterator(trial.end()));
  }
  return out;
}

namespace {

struct CandidateStats {
  std::size_t index = 0;
  std::string order_key;  // canonical config JSON, the tie breaker
  bool usable = false;    // has at least one successful record
  bool di_defined = false;
  double mean_di = 0.0;
  double mean_precision = 0.0;
  double mean_recall = 0.0;
  double mean_f1 = 0.0;
};

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  std::size_t m = v.size() / 2;
  return v.size() % 2 == 1 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

CandidateStats candidate_stats(std::size_t index, const GridCandidate& c) {
  CandidateStats s;
  s.index = index;
  s.order_key = c.config.to_json().dump();
  std::vector<double> di, precision, recall, f1;
  for (const auto& r : c.records) {
    if (r.failed) continue;
    if (MetricValue v = r.metric(MetricKind::disparate_impact); v.defined) di.push_back(v.value);
    if (MetricValue v = r.metric(MetricKind::precision); v.defined) precision.push_back(v.value);
    if (MetricValue v = r.metric(MetricKind::recall); v.defined) recall.push_back(v.value);
    if (MetricValue v = r.metric(MetricKind::f1); v.defined) f1.push_back(v.value);
  }
  s.usable = !precision.empty() && !recall.empty() && !f1.empty();
  if (!di.empty()) {
    s.di_defined = true;
    s.mean_di = mean_of(di);
  }
  if (s.usable) {
    s.mean_precision = mean_of(precision);
    s.mean_recall = mean_of(recall);
    s.mean_f1 = mean_of(f1);
  }
  return s;
}

}  // namespace

SelectionResult grid_select(const std::vector<GridCandidate>& candidates,
                            const SelectionPolicy& policy) {
  if (candidates.empty()) throw ConfigError("grid_select: no candidates");

  std::vector<CandidateStats> stats;
  for (std::size_t i = 0; i < candidates.size(); ++i)
    stats.push_back(candidate_stats(i, candidates[i]));

  std::vector<const CandidateStats*> usable;
  for (const auto& s : stats)
    if (s.usable) usable.push_back(&s);
  if (usable.empty())
    throw DegenerateGroupError("grid_select: every candidate failed all folds");

  auto filter1 = [&](const CandidateStats* s) {
    return s->di_defined && s->mean_di >= policy.di_low && s->mean_di <= policy.di_high;
  };
  auto filter2 = [](const CandidateStats* s) { return s->mean_precision > 0.0; };

  // filter 3 thresholds over a survivor set; with fewer than two survivors
  // there is no population to compare against and the filter passes all
  auto apply_filter3 = [](const std::vector<const CandidateStats*>& in, double* threshold_out) {
    if (in.size() <= 1) {
      *threshold_out = 0.0;
      return in;
    }
    std::vector<double> f1s;
    for (const auto* s : in) f1s.push_back(s->mean_f1);
    double threshold = std::max(mean_of(f1s), median_of(f1s));
    *threshold_out = threshold;
    std::vector<const CandidateStats*> out;
    for (const auto* s : in)
      if (s->mean_f1 > threshold) out.push_back(s);
    return out;
  };

  SelectionResult result;
  double threshold = 0.0;
  std::vector<const CandidateStats*> survivors;

  std::vector<const CandidateStats*> pass12;
  for (const auto* s : usable)
    if (filter1(s) && filter2(s)) pass12.push_back(s);
  survivors = apply_filter3(pass12, &threshold);

  if (survivors.empty()) {
    result.relaxed = true;
    result.dropped_filters = {3};
    survivors = pass12;
  }
  if (survivors.empty()) {
    result.dropped_filters = {3, 1};
    for (const auto* s : usable)
      if (filter2(s)) survivors.push_back(s);
  }
  if (survivors.empty()) {
    result.dropped_filters = {3, 1, 2};
    survivors = usable;
  }

  const CandidateStats* best = survivors.front();
  for (const auto* s : survivors) {
    double obj = policy.prefer_precision ? s->mean_precision : s->mean_recall;
    double best_obj = policy.prefer_precision ? best->mean_precision : best->mean_recall;
    if (obj > best_obj || (obj == best_obj && s->order_key < best->order_key)) best = s;
  }
  result.chosen = candidates[best->index].config;

  json trace = json::array();
  for (const auto& s : stats) {
    json row{{"config", candidates[s.index].config.to_json()},
             {"records", candidates[s.index].records.size()},
             {"usable", s.usable}};
    if (s.usable) {
      row["mean_di"] = s.di_defined ? json(s.mean_di) : json();
      row["mean_precision"] = s.mean_precision;
      row["mean_recall"] = s.mean_recall;
      row["mean_f1"] = s.mean_f1;
    }
    trace.push_back(std::move(row));
  }
  result.trace = json{{"candidates", std::move(trace)},
                      {"f1_threshold", threshold},
                      {"chosen_index", best->index},
                      {"objective", policy.prefer_precision ? "precision" : "recall"},
                      {"dropped_filters", result.dropped_filters}};
  return result;
}

std::vector<MitigatorConfig> default_candidate_grid(MitigatorKind kind) {
  switch (kind) {
    case MitigatorKind::pre:
      return {MitigatorConfig{"reweighing", json::object()},
              MitigatorConfig{"di_remover", {{"repair_level", 0.4}}},
              MitigatorConfig{"di_remover", {{"repair_level", 0.8}}},
              MitigatorConfig{"di_remover", {{"repair_level", 1.0}}},
              MitigatorConfig{"lfr", {{"k", 5}, {"Ax", 0.01}, {"Ay", 10.0}, {"Az", 5.0}}}};
    case MitigatorKind::in:
      return {MitigatorConfig{"prejudice_remover", {{"eta", 1.0}}},
              MitigatorConfig{"prejudice_remover", {{"eta", 10.0}}},
              MitigatorConfig{"prejudice_remover", {{"eta", 100.0}}},
              MitigatorConfig{"prejudice_remover", {{"eta", 1000.0}}}};
    case MitigatorKind::post:
      return {MitigatorConfig{"calibrated_eq_odds", {{"cost_constraint", "fpr"}}},
              MitigatorConfig{"calibrated_eq_odds", {{"cost_constraint", "fnr"}}},
              MitigatorConfig{"calibrated_eq_odds", {{"cost_constraint", "weighted"}}}};
    default:
      throw ConfigError("no candidate grid for mitigator kind '" + mitigator_kind_name(kind) +
                        "'");
  }
}

json GridOptions::to_json() const {
  return {{"bagging_sizes", bagging_sizes}, {"boosting_sizes", boosting_sizes}};
}

GridOptions GridOptions::from_json(const json& j) {
  GridOptions g;
  g.bagging_sizes = j.value("bagging_sizes", g.bagging_sizes);
  g.boosting_sizes = j.value("boosting_sizes", g.boosting_sizes);
  if (g.bagging_sizes.empty() || g.boosting_sizes.empty())
    throw ConfigError("grid: size lists must be nonempty");
  return g;
}

std::vector<MitigationPlan> enumerate_plans(
    const std::map<MitigatorKind, MitigatorConfig>& selected, const GridOptions& grid) {
  auto cfg = [&](MitigatorKind k) {
    auto it = selected.find(k);
    return it == selected.end() ? MitigatorConfig{} : it->second;
  };

  std::vector<MitigationPlan> out;
  auto add = [&](MitigationPlan p) {
    if (auto reason = validate_plan(p))
      throw BuildError("enumerated an invalid plan " + p.notation() + ": " + *reason);
    out.push_back(std::move(p));
  };

  const MitigatorKind kinds[] = {MitigatorKind::pre, MitigatorKind::in, MitigatorKind::post};

  MitigationPlan bare;
  add(bare);
  for (MitigatorKind mk : kinds) {
    MitigationPlan p;
    p.mitigator = mk;
    p.config = cfg(mk);
    add(p);
  }

  for (EnsembleKind ek : {EnsembleKind::bagging, EnsembleKind::boosting}) {
    const auto& sizes = ek == EnsembleKind::bagging ? grid.bagging_sizes : grid.boosting_sizes;
    for (int n : sizes) {
      MitigationPlan base;
      base.ensemble = ek;
      base.n = n;
      add(base);
      for (MitigatorKind mk : kinds) {
        MitigationPlan p = base;
        p.mitigator = mk;
        p.config = cfg(mk);
        add(p);
      }
      for (MitigatorKind mk : {MitigatorKind::pre, MitigatorKind::post}) {
        MitigationPlan p = base;
        p.mitigator = mk;
        p.level = MitigationLevel::ensemble;
        p.config = cfg(mk);
        add(p);
      }
    }
  }

  MitigationPlan vote;
  vote.ensemble = EnsembleKind::voting;
  vote.voting_mode = "soft";
  add(vote);
  for (MitigatorKind mk : kinds) {
    MitigationPlan p = vote;
    p.mitigator = mk;
    p.config = cfg(mk);
    add(p);
  }
  for (MitigatorKind mk : {MitigatorKind::pre, MitigatorKind::post}) {
    MitigationPlan p = vote;
    p.mitigator = mk;
    p.level = MitigationLevel::ensemble;
    p.config = cfg(mk);
    add(p);
  }

  MitigationPlan stack;
  stack.ensemble = EnsembleKind::stacking;
  add(stack);
  for (MitigatorKind mk : kinds) {
    for (bool pt : {false, true}) {
      MitigationPlan p = stack;
      p.mitigator = mk;
      p.config = cfg(mk);
      p.mitigate_base = true;
      p.passthrough = pt;
      add(p);
    }
  }
  for (MitigatorKind mk : kinds) {
    MitigationPlan p = stack;
    p.mitigator = mk;
    p.config = cfg(mk);
    p.mitigate_final = true;
    p.passthrough = true;
    add(p);
  }
  for (MitigatorKind mk : {MitigatorKind::pre, MitigatorKind::post}) {
    MitigationPlan p = stack;
    p.mitigator = mk;
    p.level = MitigationLevel::ensemble;
    p.config = cfg(mk);
    add(p);
  }

  return out;
}

std::size_t run_main_grid(const std::vector<DatasetEntry>& datasets, RecordStore& store,
                          const MainGridOptions& opt,
                          const std::function<void(const std::string&)>& log) {
  struct Job {
    const DatasetEntry* entry;
    MitigationPlan plan;
    int trial;
  };

  std::vector<Job> jobs;
  for (const auto& entry : datasets) {
    auto plans = enumerate_plans(entry.selected, opt.grid);
    for (const auto& plan : plans)
      for (int t = 0; t < opt.cv.trials; ++t) jobs.push_back({&entry, plan, t});
  }
  if (jobs.empty()) return 0;

  // records are flushed in enumeration order so the store's contents are
  // independent of the worker count and scheduling
  std::vector<std::optional<std::vector<ExperimentRecord>>> results(jobs.size());
  std::atomic<std::size_t> next{0};
  std::mutex flush_mu;
  std::size_t flushed = 0;
  std::size_t appended = 0;
  std::mutex log_mu;
  std::atomic<std::size_t> done{0};

  auto worker = [&]() {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= jobs.size()) break;
      const Job& job = jobs[i];

      bool complete = true;
      std::string plan_key = job.plan.key();
      for (int f = 0; f < opt.cv.folds && complete; ++f)
        complete = store.contains(
            ExperimentRecord::make_key(job.entry->id, plan_key, job.trial, f));

      std::vector<ExperimentRecord> recs;
      if (!complete)
        recs = run_cv_trial(job.entry->data, job.entry->fi, job.plan, job.entry->roster,
                            job.entry->id, job.trial, opt.cv);

      {
        std::lock_guard<std::mutex> lock(flush_mu);
        results[i] = std::move(recs);
        while (flushed < jobs.size() && results[flushed].has_value()) {
          for (const auto& r : *results[flushed])
            if (store.append(r)) ++appended;
          results[flushed].reset();
          ++flushed;
        }
      }

      std::size_t finished = done.fetch_add(1) + 1;
      if (log) {
        std::lock_guard<std::mutex> lock(log_mu);
        log("[" + std::to_string(finished) + "/" + std::to_string(jobs.size()) + "] " +
            job.entry->id + " " + job.plan.notation() + " trial " +
            std::to_string(job.trial) + (complete ? " (cached)" : ""));
      }
    }
  };

  std::size_t nthreads = std::max<std::size_t>(
      1, std::min<std::size_t>(static_cast<std::size_t>(std::max(1, opt.jobs)), jobs.size()));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < nthreads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  std::lock_guard<std::mutex> lock(flush_mu);
  return appended;
}

SelectionResult run_grid_search(const DatasetEntry& entry, MitigatorKind kind,
                                const std::vector<MitigatorConfig>& grid,
                                const SelectionPolicy& policy, const CvOptions& opt,
                                RecordStore* store) {
  if (kind == MitigatorKind::none)
    throw ConfigError("grid search needs a mitigator kind (pre, in, or post)");
  std::vector<GridCandidate> candidates;
  for (const auto& config : grid) {
    MitigationPlan plan;
    plan.mitigator = kind;
    plan.config = config;
    auto records = run_cv(entry.data, entry.fi, plan, entry.roster, entry.id, opt);
    if (store)
      for (const auto& r : records) store->append(r);
    candidates.push_back({config, std::move(records)});
  }
  return grid_select(candidates, policy);
}

}  // namespace fairens
