#include "fairens/guidance.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "fairens/errors.hpp"

namespace fairens {

using nlohmann::json;

json DatasetMeta::to_json() const {
  return {{"id", id}, {"rows", rows}, {"baseline_di", baseline_di}};
}

DatasetMeta DatasetMeta::from_json(const json& j) {
  DatasetMeta m;
  j.at("id").get_to(m.id);
  j.at("rows").get_to(m.rows);
  m.baseline_di = j.at("baseline_di").get<MetricValue>();
  return m;
}

namespace {

struct PlanScores {
  std::string key;
  std::string notation;
  double di_outcome = 0.0;
  double f1_outcome = 0.0;
};

std::vector<std::string> survivor_keys(const std::vector<StandardizedScore>& scores,
                                       const std::string& dataset) {
  std::map<std::string, PlanScores> plans;  // key -> partial scores
  std::set<std::string> have_di, have_f1;
  for (const auto& s : scores) {
    if (s.dataset != dataset) continue;
    if (s.metric != MetricKind::disparate_impact && s.metric != MetricKind::f1) continue;
    std::string key = s.plan.key();
    auto& p = plans[key];
    p.key = key;
    p.notation = s.plan.notation();
    if (s.metric == MetricKind::disparate_impact) {
      p.di_outcome = s.outcome;
      have_di.insert(key);
    } else {
      p.f1_outcome = s.outcome;
      have_f1.insert(key);
    }
  }

  std::vector<PlanScores> both;
  for (const auto& [key, p] : plans)
    if (have_di.count(key) && have_f1.count(key)) both.push_back(p);
  if (both.empty()) return {};

  std::size_t k = static_cast<std::size_t>(
      std::ceil(0.33 * static_cast<double>(both.size())));

  auto top_by = [&](auto score_of) {
    std::vector<const PlanScores*> order;
    for (const auto& p : both) order.push_back(&p);
    std::sort(order.begin(), order.end(), [&](const PlanScores* a, const PlanScores* b) {
      double sa = score_of(a), sb = score_of(b);
      if (sa != sb) return sa > sb;
      if (a->notation != b->notation) return a->notation < b->notation;
      return a->key < b->key;
    });
    std::set<std::string> keep;
    for (std::size_t i = 0; i < k && i < order.size(); ++i) keep.insert(order[i]->key);
    return keep;
  };

  std::set<std::string> top_di = top_by([](const PlanScores* p) { return p->di_outcome; });
  std::set<std::string> top_f1 = top_by([](const PlanScores* p) { return p->f1_outcome; });

  std::vector<std::string> out;
  for (const auto& key : top_di)
    if (top_f1.count(key)) out.push_back(key);
  std::sort(out.begin(), out.end());
  return out;
}

/// Lower is better for difference and resource outcomes; higher for
/// ratio and predictive ones.
bool outcome_minimized(MetricKind k) {
  MetricFamily f = metric_family(k);
  return f == MetricFamily::difference || f == MetricFamily::resource;
}

}  // namespace

std::vector<std::string> guidance_survivors(const std::vector<StandardizedScore>& scores,
                                            const std::string& dataset) {
  std::vector<std::string> keys = survivor_keys(scores, dataset);
  std::map<std::string, std::string> notation_by_key;
  for (const auto& s : scores)
    if (s.dataset == dataset) notation_by_key.emplace(s.plan.key(), s.plan.notation());
  std::set<std::string> notations;
  for (const auto& key : keys) notations.insert(notation_by_key.at(key));
  return {notations.begin(), notations.end()};
}

GuidanceTree build_guidance(const std::vector<StandardizedScore>& scores,
                            const std::vector<DatasetMeta>& meta,
                            const GuidanceOptions& opt) {
  GuidanceTree tree;
  tree.options = opt;
  for (std::size_t q = 0; q < 4; ++q) {
    tree.quadrants[q].large = (q & 2) != 0;
    tree.quadrants[q].very_unfair = (q & 1) != 0;
  }

  std::set<std::string> score_datasets;
  for (const auto& s : scores) score_datasets.insert(s.dataset);
  std::map<std::string, const DatasetMeta*> meta_by_id;
  for (const auto& m : meta) meta_by_id[m.id] = &m;
  for (const auto& id : score_datasets)
    if (!meta_by_id.count(id))
      throw ConfigError("build_guidance: no dataset facts for '" + id + "'");

  // (quadrant, dataset, surviving plan key)
  struct SurvivorRef {
    std::size_t quadrant;
    std::string dataset;
    std::set<std::string> keys;
  };
  std::vector<SurvivorRef> survivors;
  for (const auto& m : meta) {
    if (!score_datasets.count(m.id)) continue;
    bool large = m.rows > opt.large_rows_threshold;
    MetricValue di = symmetrize(m.baseline_di, MetricKind::disparate_impact);
    bool very_unfair = di.defined && di.value < opt.very_unfair_di;
    std::size_t q = (large ? 2u : 0u) + (very_unfair ? 1u : 0u);
    tree.quadrants[q].datasets.push_back(m.id);
    std::vector<std::string> keys = survivor_keys(scores, m.id);
    survivors.push_back({q, m.id, {keys.begin(), keys.end()}});
  }

  std::vector<MetricKind> kinds;
  for (MetricKind k : all_metrics())
    if (std::any_of(scores.begin(), scores.end(),
                    [&](const auto& s) { return s.metric == k; }))
      kinds.push_back(k);

  for (std::size_t q = 0; q < 4; ++q) {
    for (MetricKind kind : kinds) {
      // per notation: one value per dataset (the mean over its surviving
      // plans with that notation), then the mean over datasets
      struct Accum {
        std::vector<double> outcome_by_dataset;
        std::vector<double> volatility_by_dataset;
      };
      std::map<std::string, Accum> per_notation;
      for (const auto& ref : survivors) {
        if (ref.quadrant != q) continue;
        std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> local;
        for (const auto& s : scores) {
          if (s.dataset != ref.dataset || s.metric != kind) continue;
          if (!ref.keys.count(s.plan.key())) continue;
          auto& slot = local[s.plan.notation()];
          slot.first.push_back(s.outcome);
          slot.second.push_back(s.volatility);
        }
        for (const auto& [notation, vals] : local) {
          auto mean = [](const std::vector<double>& v) {
            double s = 0.0;
            for (double x : v) s += x;
            return s / static_cast<double>(v.size());
          };
          per_notation[notation].outcome_by_dataset.push_back(mean(vals.first));
          per_notation[notation].volatility_by_dataset.push_back(mean(vals.second));
        }
      }
      if (per_notation.empty()) continue;

      std::vector<GuidanceEntry> outcome_entries, volatility_entries;
      for (const auto& [notation, acc] : per_notation) {
        auto mean = [](const std::vector<double>& v) {
          double s = 0.0;
          for (double x : v) s += x;
          return s / static_cast<double>(v.size());
        };
        outcome_entries.push_back({notation, mean(acc.outcome_by_dataset)});
        volatility_entries.push_back({notation, mean(acc.volatility_by_dataset)});
      }

      bool minimize = outcome_minimized(kind);
      std::sort(outcome_entries.begin(), outcome_entries.end(),
                [&](const GuidanceEntry& a, const GuidanceEntry& b) {
                  if (a.score != b.score) return minimize ? a.score < b.score : a.score > b.score;
                  return a.notation < b.notation;
                });
      std::sort(volatility_entries.begin(), volatility_entries.end(),
                [](const GuidanceEntry& a, const GuidanceEntry& b) {
                  if (a.score != b.score) return a.score < b.score;
                  return a.notation < b.notation;
                });
      if (outcome_entries.size() > opt.top_k) outcome_entries.resize(opt.top_k);
      if (volatility_entries.size() > opt.top_k) volatility_entries.resize(opt.top_k);
      tree.quadrants[q].top_outcome[metric_name(kind)] = std::move(outcome_entries);
      tree.quadrants[q].top_volatility[metric_name(kind)] = std::move(volatility_entries);
    }
  }
  return tree;
}

json GuidanceTree::to_json() const {
  auto entries_json = [](const std::map<std::string, std::vector<GuidanceEntry>>& m) {
    json out = json::object();
    for (const auto& [metric, entries] : m) {
      json list = json::array();
      for (const auto& e : entries)
        list.push_back({{"notation", e.notation}, {"score", e.score}});
      out[metric] = std::move(list);
    }
    return out;
  };

  json quadrants_j = json::array();
  for (const auto& q : quadrants) {
    quadrants_j.push_back({{"large", q.large},
                           {"very_unfair", q.very_unfair},
                           {"datasets", q.datasets},
                           {"top_outcome", entries_json(q.top_outcome)},
                           {"top_volatility", entries_json(q.top_volatility)}});
  }
  return {{"large_rows_threshold", options.large_rows_threshold},
          {"very_unfair_di", options.very_unfair_di},
          {"quadrants", std::move(quadrants_j)}};
}

namespace {

std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

}  // namespace

std::string emit_dot(const GuidanceTree& tree) {
  std::ostringstream out;
  out << "digraph guidance {\n";
  out << "  node [shape=box fontname=\"monospace\"];\n";
  out << "  root [label=\"rows > " << tree.options.large_rows_threshold << "?\"];\n";
  out << "  large [label=\"baseline DI < " << tree.options.very_unfair_di << "?\"];\n";
  out << "  small [label=\"baseline DI < " << tree.options.very_unfair_di << "?\"];\n";
  out << "  root -> large [label=\"yes\"];\n";
  out << "  root -> small [label=\"no\"];\n";

  for (std::size_t q = 0; q < 4; ++q) {
    const GuidanceQuadrant& quad = tree.quadrants[q];
    std::string name = std::string(quad.large ? "large" : "small") + "_" +
                       (quad.very_unfair ? "unfair" : "fair");
    std::ostringstream label;
    label << (quad.large ? "large" : "small") << ", "
          << (quad.very_unfair ? "very unfair" : "fair") << "\\n";
    if (quad.datasets.empty()) {
      label << "no datasets";
    } else {
      label << "datasets:";
      for (const auto& d : quad.datasets) label << ' ' << dot_escape(d);
    }
    for (const auto& [metric, entries] : quad.top_outcome) {
      label << "\\n" << metric << " outcome:";
      for (const auto& e : entries) label << " " << dot_escape(e.notation) << ";";
    }
    for (const auto& [metric, entries] : quad.top_volatility) {
      label << "\\n" << metric << " volatility:";
      for (const auto& e : entries) label << " " << dot_escape(e.notation) << ";";
    }
    out << "  " << name << " [label=\"" << label.str() << "\"];\n";
    out << "  " << (quad.large ? "large" : "small") << " -> " << name << " [label=\""
        << (quad.very_unfair ? "yes" : "no") << "\"];\n";
  }
  out << "}\n";
  return out.str();
}

}  // namespace fairens
