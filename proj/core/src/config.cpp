#include "fairens/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "fairens/arff.hpp"
#include "fairens/csvio.hpp"
#include "fairens/fixtures.hpp"

namespace fairens {

using nlohmann::json;

namespace {

class Checker {
 public:
  void fail(const std::string& ptr, const std::string& msg) {
    errors_.push_back(ptr + ": " + msg);
  }

  bool object(const json& j, const std::string& ptr) {
    if (j.is_object()) return true;
    fail(ptr, "expected an object");
    return false;
  }

  void known_keys(const json& j, const std::string& ptr, std::set<std::string> allowed) {
    for (const auto& item : j.items())
      if (!allowed.count(item.key())) fail(ptr + "/" + item.key(), "unknown field");
  }

  bool get_string(const json& j, const std::string& ptr, const char* key, std::string& out,
                  bool required = false) {
    if (!j.contains(key)) {
      if (required) fail(ptr + "/" + key, "required field is missing");
      return false;
    }
    if (!j.at(key).is_string()) {
      fail(ptr + "/" + key, "expected a string");
      return false;
    }
    out = j.at(key).get<std::string>();
    return true;
  }

  bool get_bool(const json& j, const std::string& ptr, const char* key, bool& out) {
    if (!j.contains(key)) return false;
    if (!j.at(key).is_boolean()) {
      fail(ptr + "/" + key, "expected a boolean");
      return false;
    }
    out = j.at(key).get<bool>();
    return true;
  }

  bool get_int(const json& j, const std::string& ptr, const char* key, long long& out,
               long long lo, long long hi) {
    if (!j.contains(key)) return false;
    if (!j.at(key).is_number_integer()) {
      fail(ptr + "/" + key, "expected an integer");
      return false;
    }
    out = j.at(key).get<long long>();
    if (out < lo || out > hi) {
      std::ostringstream m;
      m << "expected a value in [" << lo << ", " << hi << "]";
      fail(ptr + "/" + key, m.str());
      return false;
    }
    return true;
  }

  bool get_number(const json& j, const std::string& ptr, const char* key, double& out) {
    if (!j.contains(key)) return false;
    if (!j.at(key).is_number()) {
      fail(ptr + "/" + key, "expected a number");
      return false;
    }
    out = j.at(key).get<double>();
    return true;
  }

  void finish() const {
    if (errors_.empty()) return;
    std::string all;
    for (const auto& e : errors_) {
      if (!all.empty()) all += '\n';
      all += e;
    }
    throw ConfigError(all);
  }

 private:
  std::vector<std::string> errors_;
};

const std::set<std::string>& learner_names() {
  static const std::set<std::string> names{"tree", "logreg", "knn", "nb"};
  return names;
}

bool mitigator_name_allowed(MitigatorKind kind, const std::string& name) {
  switch (kind) {
    case MitigatorKind::pre:
      return name == "reweighing" || name == "di_remover" || name == "lfr";
    case MitigatorKind::in:
      return name == "prejudice_remover";
    case MitigatorKind::post:
      return name == "calibrated_eq_odds";
    default:
      return false;
  }
}

void parse_roster(Checker& c, const json& j, const std::string& ptr, Roster& out) {
  if (!c.object(j, ptr)) return;
  c.known_keys(j, ptr, {"base", "members", "final_estimator", "in_etas"});
  c.get_string(j, ptr, "base", out.base);
  c.get_string(j, ptr, "final_estimator", out.final_estimator);
  if (j.contains("members")) {
    if (!j.at("members").is_array()) {
      c.fail(ptr + "/members", "expected an array of estimator names");
    } else {
      out.members.clear();
      std::size_t i = 0;
      for (const auto& m : j.at("members")) {
        if (!m.is_string())
          c.fail(ptr + "/members/" + std::to_string(i), "expected a string");
        else
          out.members.push_back(m.get<std::string>());
        ++i;
      }
      if (out.members.size() < 2) c.fail(ptr + "/members", "need at least 2 members");
    }
  }
  if (j.contains("in_etas")) {
    if (!j.at("in_etas").is_array()) {
      c.fail(ptr + "/in_etas", "expected an array of numbers");
    } else {
      out.in_etas.clear();
      std::size_t i = 0;
      for (const auto& m : j.at("in_etas")) {
        if (!m.is_number())
          c.fail(ptr + "/in_etas/" + std::to_string(i), "expected a number");
        else
          out.in_etas.push_back(m.get<double>());
        ++i;
      }
      if (out.in_etas.size() < 2) c.fail(ptr + "/in_etas", "need at least 2 strengths");
    }
  }
  if (!learner_names().count(out.base))
    c.fail(ptr + "/base", "unknown estimator '" + out.base + "'");
  if (!learner_names().count(out.final_estimator))
    c.fail(ptr + "/final_estimator", "unknown estimator '" + out.final_estimator + "'");
  for (std::size_t i = 0; i < out.members.size(); ++i)
    if (!learner_names().count(out.members[i]))
      c.fail(ptr + "/members/" + std::to_string(i),
             "unknown estimator '" + out.members[i] + "'");
}

void parse_sizes(Checker& c, const json& j, const std::string& ptr, std::vector<int>& out) {
  if (!j.is_array() || j.empty()) {
    c.fail(ptr, "expected a nonempty array of positive integers");
    return;
  }
  out.clear();
  std::size_t i = 0;
  for (const auto& v : j) {
    if (!v.is_number_integer() || v.get<long long>() < 1)
      c.fail(ptr + "/" + std::to_string(i), "expected a positive integer");
    else
      out.push_back(static_cast<int>(v.get<long long>()));
    ++i;
  }
}

void parse_selected(Checker& c, const json& j, const std::string& ptr,
                    std::map<MitigatorKind, MitigatorConfig>& out) {
  if (!c.object(j, ptr)) return;
  c.known_keys(j, ptr, {"pre", "in", "post"});
  const std::pair<const char*, MitigatorKind> kinds[] = {
      {"pre", MitigatorKind::pre}, {"in", MitigatorKind::in}, {"post", MitigatorKind::post}};
  for (const auto& [key, kind] : kinds) {
    if (!j.contains(key)) continue;
    std::string kptr = ptr + "/" + key;
    const json& cj = j.at(key);
    if (!c.object(cj, kptr)) continue;
    c.known_keys(cj, kptr, {"name", "hyperparameters"});
    MitigatorConfig mc;
    if (!c.get_string(cj, kptr, "name", mc.name, true)) continue;
    if (cj.contains("hyperparameters")) {
      if (!cj.at("hyperparameters").is_object()) {
        c.fail(kptr + "/hyperparameters", "expected an object");
        continue;
      }
      mc.hyperparameters = cj.at("hyperparameters");
    }
    if (!mitigator_name_allowed(kind, mc.name)) {
      c.fail(kptr + "/name",
             "'" + mc.name + "' is not a " + std::string(key) + "-estimator mitigator");
      continue;
    }
    out[kind] = std::move(mc);
  }
}

void parse_source(Checker& c, const json& j, const std::string& ptr, SourceSpec& out) {
  if (!c.object(j, ptr)) return;
  c.known_keys(j, ptr,
               {"kind", "path", "openml_id", "rows", "features", "target_di",
                "privileged_fraction", "favorable_rate_privileged", "seed"});
  if (!c.get_string(j, ptr, "kind", out.kind, true)) return;
  const std::set<std::string> kinds{"csv", "arff", "openml", "synthetic", "catalog"};
  if (!kinds.count(out.kind)) {
    c.fail(ptr + "/kind", "expected one of csv, arff, openml, synthetic, catalog");
    return;
  }
  c.get_string(j, ptr, "path", out.path);
  long long id = 0;
  if (c.get_int(j, ptr, "openml_id", id, 1, std::numeric_limits<long long>::max()))
    out.openml_id = static_cast<long>(id);

  if ((out.kind == "csv" || out.kind == "arff") && out.path.empty())
    c.fail(ptr + "/path", "required for " + out.kind + " sources");
  if (out.kind == "openml" && out.openml_id == 0)
    c.fail(ptr + "/openml_id", "required for openml sources");
  if (out.kind != "synthetic") {
    for (const char* key :
         {"rows", "features", "target_di", "privileged_fraction",
          "favorable_rate_privileged", "seed"})
      if (j.contains(key)) c.fail(ptr + "/" + key, "only valid for synthetic sources");
    return;
  }

  long long rows = 0, features = 0, seed = 0;
  if (c.get_int(j, ptr, "rows", rows, 20, 10000000))
    out.synthetic.rows = static_cast<std::size_t>(rows);
  if (c.get_int(j, ptr, "features", features, 1, 1000))
    out.synthetic.features = static_cast<std::size_t>(features);
  if (c.get_int(j, ptr, "seed", seed, 0, std::numeric_limits<long long>::max()))
    out.synthetic.seed = static_cast<std::uint64_t>(seed);
  double v = 0;
  if (c.get_number(j, ptr, "target_di", v)) {
    if (v <= 0) c.fail(ptr + "/target_di", "expected a positive ratio");
    out.synthetic.target_di = v;
  }
  if (c.get_number(j, ptr, "privileged_fraction", v)) {
    if (v <= 0 || v >= 1) c.fail(ptr + "/privileged_fraction", "expected a value in (0, 1)");
    out.synthetic.privileged_fraction = v;
  }
  if (c.get_number(j, ptr, "favorable_rate_privileged", v)) {
    if (v <= 0 || v >= 1)
      c.fail(ptr + "/favorable_rate_privileged", "expected a value in (0, 1)");
    out.synthetic.favorable_rate_privileged = v;
  }
}

void parse_dataset(Checker& c, const json& j, const std::string& ptr, DatasetSpec& out) {
  if (!c.object(j, ptr)) return;
  c.known_keys(j, ptr,
               {"id", "source", "target", "fairness", "drop", "prefer_precision", "selected"});
  c.get_string(j, ptr, "id", out.id, true);
  if (out.id.empty()) c.fail(ptr + "/id", "must be nonempty");
  if (!j.contains("source")) {
    c.fail(ptr + "/source", "required field is missing");
  } else {
    parse_source(c, j.at("source"), ptr + "/source", out.source);
  }
  c.get_string(j, ptr, "target", out.target);
  if (j.contains("fairness")) {
    try {
      out.fairness = FairnessInfo::from_json(j.at("fairness"));
      if (out.fairness->favorable_labels.empty())
        c.fail(ptr + "/fairness/favorable_labels", "must be nonempty");
      if (out.fairness->protected_attributes.empty())
        c.fail(ptr + "/fairness/protected_attributes", "must be nonempty");
    } catch (const std::exception& e) {
      c.fail(ptr + "/fairness", e.what());
    }
  }
  if (j.contains("drop")) {
    if (!j.at("drop").is_array()) {
      c.fail(ptr + "/drop", "expected an array of column names");
    } else {
      std::size_t i = 0;
      for (const auto& d : j.at("drop")) {
        if (!d.is_string())
          c.fail(ptr + "/drop/" + std::to_string(i), "expected a string");
        else
          out.drop.push_back(d.get<std::string>());
        ++i;
      }
    }
  }
  bool b = false;
  if (c.get_bool(j, ptr, "prefer_precision", b)) out.prefer_precision = b;
  if (j.contains("selected")) parse_selected(c, j.at("selected"), ptr + "/selected", out.selected);

  const bool self_describing = out.source.kind == "synthetic" || out.source.kind == "catalog";
  if (!self_describing && !out.fairness)
    c.fail(ptr + "/fairness", "required unless the source is synthetic or from the catalog");
  if (out.source.kind == "catalog" && !catalog_find(out.id))
    c.fail(ptr + "/id", "'" + out.id + "' is not in the dataset catalog");
  if (out.source.kind == "openml" && !out.target.empty())
    c.fail(ptr + "/target", "openml sources use the repository's default target");
}

}  // namespace

RunConfig RunConfig::from_json(const json& j) {
  Checker c;
  RunConfig cfg;
  if (!j.is_object()) {
    c.fail("", "expected a configuration object");
    c.finish();
  }
  c.known_keys(j, "",
               {"output_dir", "seed", "trials", "folds", "jobs", "record_predictions",
                "deterministic_resources", "cache_dir", "roster", "grid", "selection",
                "guidance", "datasets"});

  std::string s;
  if (c.get_string(j, "", "output_dir", s)) cfg.output_dir = s;
  if (c.get_string(j, "", "cache_dir", s)) cfg.cache_dir = s;
  long long v = 0;
  if (c.get_int(j, "", "seed", v, 0, std::numeric_limits<long long>::max()))
    cfg.seed = static_cast<std::uint64_t>(v);
  if (c.get_int(j, "", "trials", v, 1, 1000)) cfg.trials = static_cast<int>(v);
  if (c.get_int(j, "", "folds", v, 2, 100)) cfg.folds = static_cast<int>(v);
  if (c.get_int(j, "", "jobs", v, 1, 4096)) cfg.jobs = static_cast<int>(v);
  c.get_bool(j, "", "record_predictions", cfg.record_predictions);
  c.get_bool(j, "", "deterministic_resources", cfg.deterministic_resources);

  if (j.contains("roster")) parse_roster(c, j.at("roster"), "/roster", cfg.roster);
  if (j.contains("grid")) {
    const json& g = j.at("grid");
    if (c.object(g, "/grid")) {
      c.known_keys(g, "/grid", {"bagging_sizes", "boosting_sizes"});
      if (g.contains("bagging_sizes"))
        parse_sizes(c, g.at("bagging_sizes"), "/grid/bagging_sizes", cfg.grid.bagging_sizes);
      if (g.contains("boosting_sizes"))
        parse_sizes(c, g.at("boosting_sizes"), "/grid/boosting_sizes", cfg.grid.boosting_sizes);
    }
  }
  if (j.contains("selection")) {
    const json& sel = j.at("selection");
    if (c.object(sel, "/selection")) {
      c.known_keys(sel, "/selection", {"di_low", "di_high"});
      c.get_number(sel, "/selection", "di_low", cfg.selection.di_low);
      c.get_number(sel, "/selection", "di_high", cfg.selection.di_high);
      if (!(cfg.selection.di_low > 0) || !(cfg.selection.di_high > cfg.selection.di_low))
        c.fail("/selection", "need 0 < di_low < di_high");
    }
  }
  if (j.contains("guidance")) {
    const json& g = j.at("guidance");
    if (c.object(g, "/guidance")) {
      c.known_keys(g, "/guidance", {"large_rows_threshold", "very_unfair_di", "top_k"});
      if (c.get_int(g, "/guidance", "large_rows_threshold", v, 1, 1000000000))
        cfg.guidance.large_rows_threshold = static_cast<std::size_t>(v);
      double d = 0;
      if (c.get_number(g, "/guidance", "very_unfair_di", d)) {
        if (d <= 0 || d > 1) c.fail("/guidance/very_unfair_di", "expected a ratio in (0, 1]");
        cfg.guidance.very_unfair_di = d;
      }
      if (c.get_int(g, "/guidance", "top_k", v, 1, 100))
        cfg.guidance.top_k = static_cast<std::size_t>(v);
    }
  }

  if (!j.contains("datasets")) {
    c.fail("/datasets", "required field is missing");
  } else if (!j.at("datasets").is_array() || j.at("datasets").empty()) {
    c.fail("/datasets", "expected a nonempty array");
  } else {
    std::set<std::string> ids;
    std::size_t i = 0;
    for (const auto& dj : j.at("datasets")) {
      DatasetSpec spec;
      parse_dataset(c, dj, "/datasets/" + std::to_string(i), spec);
      if (!spec.id.empty() && !ids.insert(spec.id).second)
        c.fail("/datasets/" + std::to_string(i) + "/id", "duplicate id '" + spec.id + "'");
      cfg.datasets.push_back(std::move(spec));
      ++i;
    }
  }

  c.finish();
  return cfg;
}

RunConfig RunConfig::load(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError(file.string() + ": cannot open configuration file");
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw ConfigError(file.string() + ": malformed JSON");
  return from_json(j);
}

json RunConfig::to_json() const {
  json datasets_j = json::array();
  for (const auto& d : datasets) {
    json source{{"kind", d.source.kind}};
    if (!d.source.path.empty()) source["path"] = d.source.path;
    if (d.source.openml_id != 0) source["openml_id"] = d.source.openml_id;
    if (d.source.kind == "synthetic") {
      source["rows"] = d.source.synthetic.rows;
      source["features"] = d.source.synthetic.features;
      source["target_di"] = d.source.synthetic.target_di;
      source["privileged_fraction"] = d.source.synthetic.privileged_fraction;
      source["favorable_rate_privileged"] = d.source.synthetic.favorable_rate_privileged;
      source["seed"] = d.source.synthetic.seed;
    }
    json dj{{"id", d.id}, {"source", std::move(source)}};
    if (!d.target.empty()) dj["target"] = d.target;
    if (d.fairness) dj["fairness"] = d.fairness->to_json();
    if (!d.drop.empty()) dj["drop"] = d.drop;
    if (d.prefer_precision) dj["prefer_precision"] = *d.prefer_precision;
    if (!d.selected.empty()) {
      json sel = json::object();
      for (const auto& [kind, mc] : d.selected) sel[mitigator_kind_name(kind)] = mc.to_json();
      dj["selected"] = std::move(sel);
    }
    datasets_j.push_back(std::move(dj));
  }
  return {{"output_dir", output_dir.string()},
          {"seed", seed},
          {"trials", trials},
          {"folds", folds},
          {"jobs", jobs},
          {"record_predictions", record_predictions},
          {"deterministic_resources", deterministic_resources},
          {"cache_dir", cache_dir.string()},
          {"roster", roster.to_json()},
          {"grid", grid.to_json()},
          {"selection", {{"di_low", selection.di_low}, {"di_high", selection.di_high}}},
          {"guidance",
           {{"large_rows_threshold", guidance.large_rows_threshold},
            {"very_unfair_di", guidance.very_unfair_di},
            {"top_k", guidance.top_k}}},
          {"datasets", std::move(datasets_j)}};
}

std::vector<LoadedDataset> load_datasets(const RunConfig& cfg, const HttpGet& http) {
  std::vector<LoadedDataset> out;
  for (const auto& spec : cfg.datasets) {
    const CatalogEntry* entry =
        spec.source.kind == "catalog" ? catalog_find(spec.id) : nullptr;
    if (spec.source.kind == "catalog" && !entry)
      throw ConfigError("dataset '" + spec.id + "' is not in the catalog");

    std::string target = spec.target;
    if (target.empty() && entry) target = entry->target;
    std::vector<std::string> drop = spec.drop;
    if (drop.empty() && entry) drop = entry->drop;
    FairnessInfo fi;
    if (spec.fairness)
      fi = *spec.fairness;
    else if (entry)
      fi = entry->fairness;
    bool prefer_precision =
        spec.prefer_precision.value_or(entry ? entry->prefer_precision : false);

    Dataset raw;
    if (spec.source.kind == "synthetic") {
      SyntheticDataset s = make_planted_bias(spec.source.synthetic);
      raw = std::move(s.data);
      fi = std::move(s.fairness_info);
      drop.clear();
    } else if (spec.source.kind == "csv" ||
               (spec.source.kind == "catalog" && !spec.source.path.empty())) {
      raw = load_csv(spec.source.path, target);
    } else if (spec.source.kind == "arff") {
      std::ifstream in(spec.source.path);
      if (!in) throw FetchError("cannot open " + spec.source.path);
      std::ostringstream buf;
      buf << in.rdbuf();
      raw = parse_arff(buf.str(), target);
    } else {
      long id = spec.source.openml_id;
      if (id == 0 && entry) id = entry->openml_id;
      if (id == 0)
        throw ConfigError("dataset '" + spec.id +
                          "' has no OpenML id; supply a local csv path");
      OpenMlClient client(resolve_cache_dir(cfg.cache_dir),
                          http ? http : default_http_get);
      raw = client.fetch(id).data;
    }

    PreprocessResult prep = preprocess(raw, fi, drop);
    LoadedDataset ld;
    ld.entry.id = spec.id;
    ld.entry.data = std::move(prep.data);
    ld.entry.fi = prep.fairness_info;
    ld.entry.roster = cfg.roster;
    ld.entry.selected = spec.selected;
    ld.meta.id = spec.id;
    ld.meta.rows = ld.entry.data.n_rows();
    ld.meta.baseline_di = baseline_di(ld.entry.data, ld.entry.fi);
    ld.prefer_precision = prefer_precision;
    ld.report = std::move(prep.report);
    out.push_back(std::move(ld));
  }
  return out;
}

}  // namespace fairens
