#include "fairens/records.hpp"

#include <utility>

#include "fairens/errors.hpp"

namespace fairens {

using nlohmann::json;

std::string ExperimentRecord::make_key(const std::string& dataset, const std::string& plan_key,
                                       int trial, int fold) {
  return json::array({dataset, plan_key, trial, fold}).dump();
}

std::string ExperimentRecord::key() const {
  return make_key(dataset, plan.key(), trial, fold);
}

MetricValue ExperimentRecord::metric(MetricKind kind) const {
  if (kind == MetricKind::time_seconds) return time_seconds;
  if (kind == MetricKind::memory_mb) return memory_mb;
  auto it = metrics.find(metric_name(kind));
  return it == metrics.end() ? MetricValue::undefined() : it->second;
}

json ExperimentRecord::to_json() const {
  json j{{"dataset", dataset},
         {"plan", plan.to_json()},
         {"trial", trial},
         {"fold", fold},
         {"seed", seed},
         {"metrics", metrics},
         {"time_seconds", time_seconds},
         {"memory_mb", memory_mb},
         {"failed", failed}};
  if (failed) j["error"] = error;
  if (!predictions.empty()) j["predictions"] = predictions;
  return j;
}

ExperimentRecord ExperimentRecord::from_json(const json& j) {
  ExperimentRecord r;
  j.at("dataset").get_to(r.dataset);
  r.plan = MitigationPlan::from_json(j.at("plan"));
  j.at("trial").get_to(r.trial);
  j.at("fold").get_to(r.fold);
  j.at("seed").get_to(r.seed);
  for (const auto& item : j.at("metrics").items())
    r.metrics[item.key()] = item.value().get<MetricValue>();
  r.time_seconds = j.at("time_seconds").get<MetricValue>();
  r.memory_mb = j.at("memory_mb").get<MetricValue>();
  r.failed = j.value("failed", false);
  r.error = j.value("error", std::string());
  if (j.contains("predictions")) j.at("predictions").get_to(r.predictions);
  return r;
}

RecordStore::RecordStore(std::filesystem::path path) : path_(std::move(path)) {
  if (std::filesystem::exists(path_)) {
    std::ifstream in(path_);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty()) continue;
      json j = json::parse(line, nullptr, false);
      if (j.is_discarded())
        throw ParseError(path_.string() + ":" + std::to_string(lineno) +
                         ": malformed record line");
      try {
        keys_.insert(ExperimentRecord::from_json(j).key());
      } catch (const json::exception& e) {
        throw ParseError(path_.string() + ":" + std::to_string(lineno) + ": " + e.what());
      }
    }
  } else if (path_.has_parent_path()) {
    std::filesystem::create_directories(path_.parent_path());
  }
  out_.open(path_, std::ios::app);
  if (!out_) throw FetchError("cannot open record store for append: " + path_.string());
}

bool RecordStore::contains(const std::string& key) const {
  std::lock_guard<std::mutex> lock(mu_);
  return keys_.count(key) != 0;
}

bool RecordStore::append(const ExperimentRecord& r) {
  std::string k = r.key();
  std::lock_guard<std::mutex> lock(mu_);
  if (!keys_.insert(k).second) return false;
  out_ << r.to_json().dump() << '\n';
  out_.flush();
  if (!out_) throw FetchError("record store write failed: " + path_.string());
  return true;
}

std::size_t RecordStore::size() const {
  std::lock_guard<std::mutex> lock(mu_);
  return keys_.size();
}

std::vector<ExperimentRecord> RecordStore::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FetchError("cannot open record store: " + path.string());
  std::vector<ExperimentRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded())
      throw ParseError(path.string() + ":" + std::to_string(lineno) +
                       ": malformed record line");
    try {
      out.push_back(ExperimentRecord::from_json(j));
    } catch (const json::exception& e) {
      throw ParseError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

namespace {

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

void RecordStore::export_csv(const std::vector<ExperimentRecord>& records, std::ostream& out) {
  out << "dataset,notation,plan_key,trial,fold,seed,failed,error";
  for (MetricKind k : all_metrics()) {
    std::string n = metric_name(k);
    out << ',' << n << ',' << n << "_defined";
  }
  out << '\n';
  out.precision(17);
  for (const auto& r : records) {
    out << csv_escape(r.dataset) << ',' << csv_escape(r.plan.notation()) << ','
        << csv_escape(r.plan.key()) << ',' << r.trial << ',' << r.fold << ',' << r.seed << ','
        << (r.failed ? 1 : 0) << ',' << csv_escape(r.error);
    for (MetricKind k : all_metrics()) {
      MetricValue v = r.metric(k);
      out << ',';
      if (v.defined) out << v.value;
      out << ',' << (v.defined ? 1 : 0);
    }
    out << '\n';
  }
}

}  // namespace fairens
