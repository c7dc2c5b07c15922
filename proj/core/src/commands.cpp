#include "fairens/commands.hpp"

#include <fstream>
#include <functional>
#include <sstream>

#include "fairens/analysis.hpp"
#include "fairens/config.hpp"
#include "fairens/fixtures.hpp"
#include "fairens/guidance.hpp"
#include "fairens/harness.hpp"

namespace fairens::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void emit_error(std::ostream& err, const std::string& type, const std::string& message) {
  err << json{{"error", {{"type", type}, {"message", message}}}}.dump() << "\n";
}

int guarded(std::ostream& err, const std::function<int()>& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    emit_error(err, "config", e.what());
    return exit_config;
  } catch (const ParseError& e) {
    emit_error(err, "parse", e.what());
    return exit_runtime;
  } catch (const FetchError& e) {
    emit_error(err, "fetch", e.what());
    return exit_runtime;
  } catch (const BuildError& e) {
    emit_error(err, "build", e.what());
    return exit_runtime;
  } catch (const SchemaError& e) {
    emit_error(err, "schema", e.what());
    return exit_runtime;
  } catch (const DegenerateGroupError& e) {
    emit_error(err, "degenerate_group", e.what());
    return exit_runtime;
  } catch (const Error& e) {
    emit_error(err, "runtime", e.what());
    return exit_runtime;
  } catch (const std::exception& e) {
    emit_error(err, "internal", e.what());
    return exit_runtime;
  }
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FetchError("cannot write " + path.string());
  out << text;
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

/// Shapes the grid never emits, kept as executable documentation of why.
std::vector<MitigationPlan> rejected_probes(const GridOptions& grid) {
  std::vector<MitigationPlan> probes;
  auto base = [&](EnsembleKind e) {
    MitigationPlan p;
    p.ensemble = e;
    if (e == EnsembleKind::bagging) p.n = grid.bagging_sizes.front();
    if (e == EnsembleKind::boosting) p.n = grid.boosting_sizes.front();
    if (e == EnsembleKind::voting) p.voting_mode = "soft";
    return p;
  };
  for (EnsembleKind e : {EnsembleKind::bagging, EnsembleKind::boosting, EnsembleKind::voting,
                         EnsembleKind::stacking}) {
    MitigationPlan p = base(e);
    p.mitigator = MitigatorKind::in;
    p.level = MitigationLevel::ensemble;
    probes.push_back(p);
  }
  {
    MitigationPlan p = base(EnsembleKind::voting);
    p.voting_mode = "hard";
    p.mitigator = MitigatorKind::post;
    p.level = MitigationLevel::ensemble;
    probes.push_back(p);
  }
  {
    MitigationPlan p = base(EnsembleKind::stacking);
    p.mitigator = MitigatorKind::pre;
    p.mitigate_base = true;
    p.mitigate_final = true;
    p.passthrough = true;
    probes.push_back(p);
  }
  {
    MitigationPlan p = base(EnsembleKind::stacking);
    p.mitigator = MitigatorKind::pre;
    p.mitigate_final = true;
    p.passthrough = false;
    probes.push_back(p);
  }
  return probes;
}

json selection_to_json(const MitigatorConfig& config, bool pinned,
                       const SelectionResult* result) {
  json j{{"config", config.to_json()}, {"pinned", pinned}};
  if (result) {
    j["relaxed"] = result->relaxed;
    j["dropped_filters"] = result->dropped_filters;
    j["trace"] = result->trace;
  }
  return j;
}

struct RunOutputs {
  fs::path records;
  fs::path csv;
  fs::path meta;
  fs::path selections;
  std::size_t appended = 0;
  std::size_t total = 0;
};

CvOptions cv_options(const RunConfig& cfg) {
  CvOptions cv;
  cv.trials = cfg.trials;
  cv.folds = cfg.folds;
  cv.base_seed = cfg.seed;
  cv.record_predictions = cfg.record_predictions;
  cv.deterministic_resources = cfg.deterministic_resources;
  return cv;
}

json run_meta_json(const RunConfig& cfg, const std::vector<LoadedDataset>& loaded) {
  json metas = json::array();
  json prefer = json::object();
  for (const auto& ld : loaded) {
    metas.push_back(ld.meta.to_json());
    prefer[ld.meta.id] = ld.prefer_precision;
  }
  return {{"datasets", std::move(metas)},
          {"prefer_precision", std::move(prefer)},
          {"selection", {{"di_low", cfg.selection.di_low}, {"di_high", cfg.selection.di_high}}},
          {"guidance",
           {{"large_rows_threshold", cfg.guidance.large_rows_threshold},
            {"very_unfair_di", cfg.guidance.very_unfair_di},
            {"top_k", cfg.guidance.top_k}}},
          {"config", cfg.to_json()}};
}

/// Step 1 for every dataset: grid-search the kinds the config left
/// unpinned, leave pinned kinds alone. Fills entry.selected in place.
json select_mitigators(const RunConfig& cfg, std::vector<LoadedDataset>& loaded,
                       RecordStore* store, std::ostream& err) {
  json out = json::object();
  CvOptions cv = cv_options(cfg);
  for (auto& ld : loaded) {
    SelectionPolicy policy;
    policy.di_low = cfg.selection.di_low;
    policy.di_high = cfg.selection.di_high;
    policy.prefer_precision = ld.prefer_precision;
    json per_kind = json::object();
    for (MitigatorKind kind : {MitigatorKind::pre, MitigatorKind::in, MitigatorKind::post}) {
      const std::string kind_name = mitigator_kind_name(kind);
      auto it = ld.entry.selected.find(kind);
      if (it != ld.entry.selected.end()) {
        per_kind[kind_name] = selection_to_json(it->second, true, nullptr);
        continue;
      }
      err << "selecting " << kind_name << "-estimator mitigator for " << ld.entry.id << "\n";
      SelectionResult res =
          run_grid_search(ld.entry, kind, default_candidate_grid(kind), policy, cv, store);
      ld.entry.selected[kind] = res.chosen;
      per_kind[kind_name] = selection_to_json(res.chosen, false, &res);
    }
    out[ld.entry.id] = std::move(per_kind);
  }
  return out;
}

RunOutputs execute_run(const RunConfig& cfg, std::ostream& err, const HttpGet& http = {}) {
  std::vector<LoadedDataset> loaded = load_datasets(cfg, http);
  fs::create_directories(cfg.output_dir);

  RunOutputs paths;
  paths.records = cfg.output_dir / "records.jsonl";
  paths.csv = cfg.output_dir / "records.csv";
  paths.meta = cfg.output_dir / "run_meta.json";
  paths.selections = cfg.output_dir / "selections.json";

  write_json(paths.meta, run_meta_json(cfg, loaded));

  RecordStore selection_store(cfg.output_dir / "selection_records.jsonl");
  json selections = select_mitigators(cfg, loaded, &selection_store, err);
  write_json(paths.selections, selections);

  std::vector<DatasetEntry> entries;
  entries.reserve(loaded.size());
  for (auto& ld : loaded) entries.push_back(std::move(ld.entry));

  MainGridOptions opt;
  opt.cv = cv_options(cfg);
  opt.grid = cfg.grid;
  opt.jobs = cfg.jobs;
  RecordStore store(paths.records);
  paths.appended = run_main_grid(entries, store, opt,
                                 [&err](const std::string& line) { err << line << "\n"; });
  paths.total = store.size();

  std::ofstream csv(paths.csv, std::ios::binary);
  if (!csv) throw FetchError("cannot write " + paths.csv.string());
  RecordStore::export_csv(RecordStore::load(paths.records), csv);
  return paths;
}

json run_summary(const RunOutputs& paths) {
  return {{"records", paths.records.string()},  {"records_csv", paths.csv.string()},
          {"meta", paths.meta.string()},        {"selections", paths.selections.string()},
          {"appended", paths.appended},         {"total_records", paths.total}};
}

std::vector<StandardizedScore> scores_for(const std::vector<ExperimentRecord>& records,
                                          std::initializer_list<MetricKind> kinds) {
  std::vector<StandardizedScore> all;
  for (MetricKind k : kinds) {
    StandardizeResult r = standardize(records, k);
    all.insert(all.end(), r.scores.begin(), r.scores.end());
  }
  return all;
}

std::vector<StandardizedScore> scores_for_all(const std::vector<ExperimentRecord>& records) {
  std::vector<StandardizedScore> all;
  for (MetricKind k : all_metrics()) {
    StandardizeResult r = standardize(records, k);
    all.insert(all.end(), r.scores.begin(), r.scores.end());
  }
  return all;
}

std::string standardized_csv(const std::vector<ExperimentRecord>& records,
                             std::vector<std::string>& degenerate) {
  std::ostringstream out;
  out << "metric,dataset,notation,plan_key,outcome,volatility,degenerate_outcome,"
         "degenerate_volatility\n";
  out.precision(17);
  auto quote = [](const std::string& s) {
    std::string q = "\"";
    for (char c : s) {
      if (c == '"') q += '"';
      q += c;
    }
    return q + "\"";
  };
  for (MetricKind k : all_metrics()) {
    StandardizeResult r = standardize(records, k);
    degenerate.insert(degenerate.end(), r.degenerate_groups.begin(),
                      r.degenerate_groups.end());
    for (const auto& s : r.scores) {
      out << metric_name(k) << ',' << quote(s.dataset) << ',' << quote(s.plan.notation())
          << ',' << quote(s.plan.key()) << ',' << s.outcome << ',' << s.volatility << ','
          << (s.degenerate_outcome ? 1 : 0) << ',' << (s.degenerate_volatility ? 1 : 0)
          << '\n';
    }
  }
  return out.str();
}

std::vector<AggregateTable> all_tables(const std::vector<ExperimentRecord>& records) {
  return {
      aggregate_rq(scores_for(records, {MetricKind::disparate_impact}), RqTable::rq1),
      aggregate_rq(scores_for(records, {MetricKind::f1}), RqTable::rq2),
      aggregate_rq(scores_for(records, {MetricKind::disparate_impact,
                                        MetricKind::statistical_parity_difference}),
                   RqTable::rq3_homogeneous),
      aggregate_rq(scores_for(records, {MetricKind::disparate_impact}),
                   RqTable::rq3_heterogeneous),
      aggregate_rq(scores_for(records, {MetricKind::average_odds_difference,
                                        MetricKind::equal_opportunity_difference}),
                   RqTable::rq3_supplement),
  };
}

struct GuidanceInputs {
  std::vector<DatasetMeta> metas;
  GuidanceOptions options;
};

GuidanceInputs load_guidance_inputs(const AnalyzeArgs& a) {
  fs::path meta_path = a.meta ? *a.meta : a.records.parent_path() / "run_meta.json";
  std::ifstream in(meta_path);
  if (!in)
    throw ConfigError("guidance needs dataset facts: cannot open " + meta_path.string() +
                      " (pass --meta)");
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw ParseError(meta_path.string() + ": malformed JSON");
  GuidanceInputs gi;
  if (!j.contains("datasets") || !j.at("datasets").is_array())
    throw ConfigError(meta_path.string() + ": expected a \"datasets\" array");
  for (const auto& m : j.at("datasets")) gi.metas.push_back(DatasetMeta::from_json(m));
  if (j.contains("guidance")) {
    const json& g = j.at("guidance");
    if (g.contains("large_rows_threshold"))
      gi.options.large_rows_threshold = g.at("large_rows_threshold").get<std::size_t>();
    if (g.contains("very_unfair_di"))
      gi.options.very_unfair_di = g.at("very_unfair_di").get<double>();
    if (g.contains("top_k")) gi.options.top_k = g.at("top_k").get<std::size_t>();
  }
  return gi;
}

int analyze_body(const AnalyzeArgs& a, std::ostream& out, std::ostream& err) {
  std::vector<ExperimentRecord> records = RecordStore::load(a.records);
  if (a.out_dir) fs::create_directories(*a.out_dir);

  if (a.mode == "standardize") {
    std::vector<std::string> degenerate;
    std::string csv = standardized_csv(records, degenerate);
    if (a.out_dir) {
      fs::path path = *a.out_dir / "standardized.csv";
      write_text(path, csv);
      out << json{{"written", {path.string()}}, {"degenerate_groups", degenerate}}.dump()
          << "\n";
    } else {
      out << csv;
    }
    return exit_ok;
  }
  if (a.mode == "tables") {
    json written = json::array();
    json tables = json::array();
    for (const AggregateTable& t : all_tables(records)) {
      tables.push_back(t.to_json());
      if (a.out_dir) {
        fs::path csv_path = *a.out_dir / (t.name + ".csv");
        fs::path txt_path = *a.out_dir / (t.name + ".txt");
        write_text(csv_path, t.to_csv());
        write_text(txt_path, t.to_text());
        written.push_back(csv_path.string());
        written.push_back(txt_path.string());
      }
    }
    json summary{{"tables", std::move(tables)}};
    if (a.out_dir) summary["written"] = std::move(written);
    out << summary.dump() << "\n";
    return exit_ok;
  }
  if (a.mode == "resources") {
    ResourceCurves curves = resource_curves(records);
    if (a.out_dir) {
      fs::path path = *a.out_dir / "resources.csv";
      write_text(path, curves.to_csv());
      json summary = curves.to_json();
      summary["written"] = {path.string()};
      out << summary.dump() << "\n";
    } else {
      out << curves.to_json().dump() << "\n";
    }
    return exit_ok;
  }
  if (a.mode == "guidance") {
    GuidanceInputs gi = load_guidance_inputs(a);
    GuidanceTree tree = build_guidance(scores_for_all(records), gi.metas, gi.options);
    json summary = tree.to_json();
    if (a.out_dir) {
      fs::path jpath = *a.out_dir / "guidance.json";
      fs::path dpath = *a.out_dir / "guidance.dot";
      write_json(jpath, tree.to_json());
      write_text(dpath, emit_dot(tree));
      summary["written"] = {jpath.string(), dpath.string()};
    }
    out << summary.dump() << "\n";
    return exit_ok;
  }
  err << "unknown analyze mode '" << a.mode
      << "' (expected standardize, tables, resources, or guidance)\n";
  throw ConfigError("unknown analyze mode '" + a.mode + "'");
}

}  // namespace

int cmd_validate(const ValidateArgs& a, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    RunConfig cfg = RunConfig::load(a.config);
    json accepted = json::array();
    for (const MitigationPlan& p : enumerate_plans({}, cfg.grid))
      accepted.push_back({{"notation", p.notation()}, {"plan", p.to_json()}});
    json rejected = json::array();
    for (const MitigationPlan& p : rejected_probes(cfg.grid)) {
      auto reason = validate_plan(p);
      if (!reason) continue;
      rejected.push_back(
          {{"notation", p.notation()}, {"plan", p.to_json()}, {"reason", *reason}});
    }
    json ids = json::array();
    for (const auto& d : cfg.datasets) ids.push_back(d.id);
    out << json{{"config", "ok"},
                {"schema", "docs/run_config.schema.json"},
                {"datasets", std::move(ids)},
                {"plan_count", accepted.size()},
                {"plans", std::move(accepted)},
                {"rejected", std::move(rejected)}}
               .dump()
        << "\n";
    return exit_ok;
  });
}

int cmd_run(const RunArgs& a, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    RunConfig cfg = RunConfig::load(a.config);
    if (a.output_dir) cfg.output_dir = *a.output_dir;
    if (a.jobs) cfg.jobs = *a.jobs;
    if (a.trials) cfg.trials = *a.trials;
    if (a.seed) cfg.seed = *a.seed;
    RunOutputs paths = execute_run(cfg, err);
    out << run_summary(paths).dump() << "\n";
    return exit_ok;
  });
}

int cmd_select(const SelectArgs& a, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    RunConfig cfg = RunConfig::load(a.config);
    if (a.output_dir) cfg.output_dir = *a.output_dir;
    if (a.seed) cfg.seed = *a.seed;
    if (a.trials) cfg.trials = *a.trials;
    std::vector<LoadedDataset> loaded = load_datasets(cfg);
    fs::create_directories(cfg.output_dir);
    write_json(cfg.output_dir / "run_meta.json", run_meta_json(cfg, loaded));
    RecordStore store(cfg.output_dir / "selection_records.jsonl");
    json selections = select_mitigators(cfg, loaded, &store, err);
    write_json(cfg.output_dir / "selections.json", selections);
    out << selections.dump() << "\n";
    return exit_ok;
  });
}

int cmd_analyze(const AnalyzeArgs& a, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] { return analyze_body(a, out, err); });
}

int cmd_guidance(const AnalyzeArgs& a, std::ostream& out, std::ostream& err) {
  AnalyzeArgs forced = a;
  forced.mode = "guidance";
  return cmd_analyze(forced, out, err);
}

int cmd_demo(const DemoArgs& a, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    RunConfig cfg;
    cfg.output_dir = a.output_dir;
    cfg.seed = a.seed;
    cfg.trials = 3;
    cfg.folds = 3;
    cfg.jobs = a.jobs;
    cfg.deterministic_resources = true;
    cfg.grid.bagging_sizes = {1, 5};
    cfg.grid.boosting_sizes = {1, 10};
    cfg.guidance.large_rows_threshold = 500;
    cfg.guidance.very_unfair_di = 0.8;
    cfg.guidance.top_k = 3;

    DatasetSpec large;
    large.id = "demo-large-biased";
    large.source.kind = "synthetic";
    large.source.synthetic.rows = 700;
    large.source.synthetic.features = 4;
    large.source.synthetic.target_di = 0.5;
    large.source.synthetic.privileged_fraction = 0.5;
    large.source.synthetic.favorable_rate_privileged = 0.6;
    large.source.synthetic.seed = a.seed;

    DatasetSpec small = large;
    small.id = "demo-small-fair";
    small.source.synthetic.rows = 320;
    small.source.synthetic.target_di = 0.95;
    small.source.synthetic.favorable_rate_privileged = 0.55;
    small.source.synthetic.seed = a.seed + 1;

    for (DatasetSpec* d : {&large, &small}) {
      d->selected[MitigatorKind::pre] = {"di_remover", {{"repair_level", 0.8}}};
      d->selected[MitigatorKind::in] = {"prejudice_remover", {{"eta", 10.0}}};
      d->selected[MitigatorKind::post] = {"calibrated_eq_odds",
                                          {{"cost_constraint", "weighted"}}};
    }
    cfg.datasets = {large, small};

    RunOutputs paths = execute_run(cfg, err);

    AnalyzeArgs analyze;
    analyze.records = paths.records;
    analyze.out_dir = cfg.output_dir / "analysis";
    std::ostringstream sink;
    for (const char* mode : {"tables", "resources", "guidance"}) {
      analyze.mode = mode;
      int rc = analyze_body(analyze, sink, err);
      if (rc != exit_ok) return rc;
    }

    json summary = run_summary(paths);
    summary["analysis_dir"] = (cfg.output_dir / "analysis").string();
    summary["guidance_dot"] = (cfg.output_dir / "analysis" / "guidance.dot").string();
    out << summary.dump() << "\n";
    return exit_ok;
  });
}

int cmd_fetch(const FetchArgs& a, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    long id = 0;
    if (!a.id.empty() && a.id.find_first_not_of("0123456789") == std::string::npos) {
      id = std::stol(a.id);
    } else if (const CatalogEntry* entry = catalog_find(a.id)) {
      if (entry->openml_id == 0)
        throw ConfigError("dataset '" + a.id +
                          "' has no OpenML source; supply a local csv path in a run config");
      id = entry->openml_id;
    } else {
      throw ConfigError("'" + a.id + "' is neither a catalog id nor a numeric OpenML id");
    }
    fs::path cache = resolve_cache_dir(a.cache_dir ? *a.cache_dir : ".fairens-cache");
    err << "fetching OpenML dataset " << id << " into " << cache.string() << "\n";
    OpenMlClient client(cache);
    OpenMlFetchResult res = client.fetch(id);
    out << json{{"id", id},
                {"name", res.name},
                {"target", res.target},
                {"rows", res.data.n_rows()},
                {"columns", res.data.names.size()},
                {"from_cache", res.from_cache},
                {"cache_dir", cache.string()}}
               .dump()
        << "\n";
    return exit_ok;
  });
}

}  // namespace fairens::cli
