#include "fairens/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>

#include "fairens/errors.hpp"

namespace fairens {

using nlohmann::json;

bool trivial_metric_value(MetricValue v, MetricKind kind) {
  if (!v.defined) return true;
  if (kind == MetricKind::disparate_impact && v.value == 0.0) return true;
  if (kind == MetricKind::f1 && v.value == 0.0) return true;
  return false;
}

StandardizeResult standardize(const std::vector<ExperimentRecord>& records, MetricKind kind) {
  struct PlanAccum {
    MitigationPlan plan;
    std::vector<double> values;
  };
  struct DatasetAccum {
    std::string id;
    std::vector<std::string> plan_order;
    std::map<std::string, PlanAccum> plans;
  };

  std::vector<DatasetAccum> groups;
  std::map<std::string, std::size_t> group_index;

  for (const auto& r : records) {
    if (r.failed) continue;
    MetricValue v = r.metric(kind);
    if (trivial_metric_value(v, kind)) continue;
    v = symmetrize(v, kind);

    auto [it, inserted] = group_index.try_emplace(r.dataset, groups.size());
    if (inserted) groups.push_back({r.dataset, {}, {}});
    DatasetAccum& g = groups[it->second];

    std::string pk = r.plan.key();
    auto [pit, pnew] = g.plans.try_emplace(pk);
    if (pnew) {
      pit->second.plan = r.plan;
      g.plan_order.push_back(pk);
    }
    pit->second.values.push_back(v.value);
  }

  StandardizeResult result;
  for (const auto& g : groups) {
    std::vector<double> means, stds;
    for (const auto& pk : g.plan_order) {
      const auto& vals = g.plans.at(pk).values;
      double mean = 0.0;
      for (double x : vals) mean += x;
      mean /= static_cast<double>(vals.size());
      double sd = 0.0;
      if (vals.size() > 1) {
        double ss = 0.0;
        for (double x : vals) ss += (x - mean) * (x - mean);
        sd = std::sqrt(ss / static_cast<double>(vals.size() - 1));
      }
      means.push_back(mean);
      stds.push_back(sd);
    }

    auto scale = [](const std::vector<double>& v, std::vector<double>& out) {
      auto [lo, hi] = std::minmax_element(v.begin(), v.end());
      bool degenerate = *hi == *lo;
      out.resize(v.size());
      for (std::size_t i = 0; i < v.size(); ++i)
        out[i] = degenerate ? 0.0 : (v[i] - *lo) / (*hi - *lo);
      return degenerate;
    };

    std::vector<double> outcome, volatility;
    bool deg_o = scale(means, outcome);
    bool deg_v = scale(stds, volatility);
    if (deg_o)
      result.degenerate_groups.push_back(g.id + "/" + metric_name(kind) + "/outcome");
    if (deg_v)
      result.degenerate_groups.push_back(g.id + "/" + metric_name(kind) + "/volatility");

    for (std::size_t i = 0; i < g.plan_order.size(); ++i) {
      StandardizedScore s;
      s.dataset = g.id;
      s.plan = g.plans.at(g.plan_order[i]).plan;
      s.metric = kind;
      s.outcome = outcome[i];
      s.volatility = volatility[i];
      s.degenerate_outcome = deg_o;
      s.degenerate_volatility = deg_v;
      result.scores.push_back(std::move(s));
    }
  }
  return result;
}

json AggregateTable::to_json() const {
  json rows_j = json::array();
  for (const auto& row : rows) {
    json cells = json::object();
    for (const auto& c : columns) {
      auto it = row.cells.find(c);
      cells[c] = (it != row.cells.end() && it->second.defined) ? json(it->second.value) : json();
    }
    rows_j.push_back({{"label", row.label}, {"cells", std::move(cells)}});
  }
  return {{"name", name}, {"columns", columns}, {"rows", std::move(rows_j)}};
}

std::string AggregateTable::to_csv() const {
  std::ostringstream out;
  out.precision(17);
  out << "row";
  for (const auto& c : columns) out << ',' << c;
  out << '\n';
  for (const auto& row : rows) {
    std::string label = row.label;
    if (label.find_first_of(",\"\n") != std::string::npos) {
      std::string q = "\"";
      for (char ch : label) {
        if (ch == '"') q += '"';
        q += ch;
      }
      q += '"';
      label = q;
    }
    out << label;
    for (const auto& c : columns) {
      out << ',';
      auto it = row.cells.find(c);
      if (it != row.cells.end() && it->second.defined) out << it->second.value;
    }
    out << '\n';
  }
  return out.str();
}

std::string AggregateTable::to_text() const {
  auto fmt = [](MetricValue v) {
    if (!v.defined) return std::string("-");
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v.value);
    return std::string(buf);
  };

  std::size_t label_w = 3;
  for (const auto& row : rows) label_w = std::max(label_w, row.label.size());
  std::vector<std::size_t> widths;
  for (const auto& c : columns) {
    std::size_t w = c.size();
    for (const auto& row : rows) {
      auto it = row.cells.find(c);
      w = std::max(w, fmt(it == row.cells.end() ? MetricValue::undefined() : it->second).size());
    }
    widths.push_back(w);
  }

  std::ostringstream out;
  out << name << '\n';
  out << std::string(label_w, ' ');
  for (std::size_t i = 0; i < columns.size(); ++i) {
    out << "  ";
    out << std::string(widths[i] - columns[i].size(), ' ') << columns[i];
  }
  out << '\n';
  for (const auto& row : rows) {
    out << row.label << std::string(label_w - row.label.size(), ' ');
    for (std::size_t i = 0; i < columns.size(); ++i) {
      auto it = row.cells.find(columns[i]);
      std::string cell =
          fmt(it == row.cells.end() ? MetricValue::undefined() : it->second);
      out << "  " << std::string(widths[i] - cell.size(), ' ') << cell;
    }
    out << '\n';
  }
  return out.str();
}

std::string rq_table_name(RqTable which) {
  switch (which) {
    case RqTable::rq1: return "rq1";
    case RqTable::rq2: return "rq2";
    case RqTable::rq3_homogeneous: return "rq3-homogeneous";
    case RqTable::rq3_heterogeneous: return "rq3-heterogeneous";
    case RqTable::rq3_supplement: return "rq3-supplement";
  }
  throw ConfigError("unknown table");
}

namespace {

MetricValue mean_scores(const std::vector<const StandardizedScore*>& group, bool volatility) {
  if (group.empty()) return MetricValue::undefined();
  double s = 0.0;
  for (const auto* sc : group) s += volatility ? sc->volatility : sc->outcome;
  return {s / static_cast<double>(group.size()), true};
}

std::string short_metric(MetricKind k) {
  switch (k) {
    case MetricKind::disparate_impact: return "di";
    case MetricKind::statistical_parity_difference: return "spd";
    case MetricKind::average_odds_difference: return "aod";
    case MetricKind::equal_opportunity_difference: return "eod";
    case MetricKind::f1: return "f1";
    default: return metric_name(k);
  }
}

AggregateTable by_ensemble_and_kind(const std::vector<StandardizedScore>& scores,
                                    MetricKind metric, const std::string& name) {
  AggregateTable table;
  table.name = name;
  const std::pair<MitigatorKind, std::string> kinds[] = {
      {MitigatorKind::none, "not_mitigated"},
      {MitigatorKind::pre, "pre"},
      {MitigatorKind::in, "in"},
      {MitigatorKind::post, "post"}};
  for (const auto& [mk, label] : kinds) {
    table.columns.push_back(label + ".outcome");
    table.columns.push_back(label + ".volatility");
  }
  const std::pair<EnsembleKind, std::string> ensembles[] = {
      {EnsembleKind::none, "No ensemble"},
      {EnsembleKind::bagging, "Bagging"},
      {EnsembleKind::boosting, "Boosting"},
      {EnsembleKind::voting, "Voting"},
      {EnsembleKind::stacking, "Stacking"}};
  for (const auto& [ek, row_label] : ensembles) {
    AggregateRow row;
    row.label = row_label;
    bool any = false;
    for (const auto& [mk, col_label] : kinds) {
      std::vector<const StandardizedScore*> group;
      for (const auto& s : scores)
        if (s.metric == metric && s.plan.ensemble == ek && s.plan.mitigator == mk)
          group.push_back(&s);
      MetricValue o = mean_scores(group, false);
      MetricValue v = mean_scores(group, true);
      row.cells[col_label + ".outcome"] = o;
      row.cells[col_label + ".volatility"] = v;
      any = any || o.defined;
    }
    if (any) table.rows.push_back(std::move(row));
  }
  return table;
}

AggregateTable by_size_and_level(const std::vector<StandardizedScore>& scores,
                                 MetricKind metric_a, MetricKind metric_b,
                                 const std::string& name) {
  AggregateTable table;
  table.name = name;
  const std::pair<MitigationLevel, std::string> levels[] = {
      {MitigationLevel::estimator, "estimator"}, {MitigationLevel::ensemble, "ensemble"}};
  for (const auto& [lvl, lvl_label] : levels)
    for (MetricKind m : {metric_a, metric_b}) {
      table.columns.push_back(lvl_label + "." + short_metric(m) + ".outcome");
      table.columns.push_back(lvl_label + "." + short_metric(m) + ".volatility");
    }

  std::set<std::pair<int, int>> seen;  // (ensemble rank, n)
  for (const auto& s : scores) {
    if (s.plan.mitigator != MitigatorKind::pre) continue;
    if (s.plan.ensemble == EnsembleKind::bagging)
      seen.insert({0, s.plan.n});
    else if (s.plan.ensemble == EnsembleKind::boosting)
      seen.insert({1, s.plan.n});
  }

  for (const auto& [rank, n] : seen) {
    EnsembleKind ek = rank == 0 ? EnsembleKind::bagging : EnsembleKind::boosting;
    AggregateRow row;
    row.label = std::string(rank == 0 ? "Bagging" : "Boosting") + " n=" + std::to_string(n);
    bool any = false;
    for (const auto& [lvl, lvl_label] : levels)
      for (MetricKind m : {metric_a, metric_b}) {
        std::vector<const StandardizedScore*> group;
        for (const auto& s : scores)
          if (s.metric == m && s.plan.ensemble == ek && s.plan.n == n &&
              s.plan.mitigator == MitigatorKind::pre && s.plan.level == lvl)
            group.push_back(&s);
        std::string base = lvl_label + "." + short_metric(m);
        MetricValue o = mean_scores(group, false);
        row.cells[base + ".outcome"] = o;
        row.cells[base + ".volatility"] = mean_scores(group, true);
        any = any || o.defined;
      }
    if (any) table.rows.push_back(std::move(row));
  }
  return table;
}

AggregateTable heterogeneous_table(const std::vector<StandardizedScore>& scores) {
  AggregateTable table;
  table.name = rq_table_name(RqTable::rq3_heterogeneous);
  table.columns = {"outcome", "volatility"};

  struct RowDef {
    std::string label;
    std::function<bool(const MitigationPlan&)> match;
  };
  const RowDef defs[] = {
      {"Voting / Ensemble-level",
       [](const MitigationPlan& p) {
         return p.ensemble == EnsembleKind::voting && p.level == MitigationLevel::ensemble;
       }},
      {"Voting / Estimator-level",
       [](const MitigationPlan& p) {
         return p.ensemble == EnsembleKind::voting && p.level == MitigationLevel::estimator;
       }},
      {"Stacking / Ensemble-level",
       [](const MitigationPlan& p) {
         return p.ensemble == EnsembleKind::stacking && p.level == MitigationLevel::ensemble;
       }},
      {"Stacking / Base estimator mitigation; No passthrough",
       [](const MitigationPlan& p) {
         return p.ensemble == EnsembleKind::stacking && p.mitigate_base && !p.passthrough;
       }},
      {"Stacking / Base estimator mitigation; Passthrough; No final mitigation",
       [](const MitigationPlan& p) {
         return p.ensemble == EnsembleKind::stacking && p.mitigate_base && p.passthrough;
       }},
      {"Stacking / No base estimator mitigation; Passthrough; Only final mitigation",
       [](const MitigationPlan& p) {
         return p.ensemble == EnsembleKind::stacking && p.mitigate_final;
       }}};

  for (const auto& def : defs) {
    std::vector<const StandardizedScore*> group;
    for (const auto& s : scores)
      if (s.metric == MetricKind::disparate_impact &&
          s.plan.mitigator == MitigatorKind::pre && def.match(s.plan))
        group.push_back(&s);
    if (group.empty()) continue;
    AggregateRow row;
    row.label = def.label;
    row.cells["outcome"] = mean_scores(group, false);
    row.cells["volatility"] = mean_scores(group, true);
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace

AggregateTable aggregate_rq(const std::vector<StandardizedScore>& scores, RqTable which) {
  switch (which) {
    case RqTable::rq1:
      return by_ensemble_and_kind(scores, MetricKind::disparate_impact, rq_table_name(which));
    case RqTable::rq2:
      return by_ensemble_and_kind(scores, MetricKind::f1, rq_table_name(which));
    case RqTable::rq3_homogeneous:
      return by_size_and_level(scores, MetricKind::disparate_impact,
                               MetricKind::statistical_parity_difference,
                               rq_table_name(which));
    case RqTable::rq3_heterogeneous:
      return heterogeneous_table(scores);
    case RqTable::rq3_supplement:
      return by_size_and_level(scores, MetricKind::average_odds_difference,
                               MetricKind::equal_opportunity_difference,
                               rq_table_name(which));
  }
  throw ConfigError("unknown table");
}

json ResourceCurves::to_json() const {
  json series_j = json::array();
  for (const auto& s : series) {
    json points = json::array();
    for (const auto& p : s.points)
      points.push_back({{"n", p.n},
                        {"time_outcome", p.time_outcome},
                        {"memory_outcome", p.memory_outcome}});
    series_j.push_back({{"level", mitigation_level_name(s.level)}, {"points", points}});
  }
  return {{"series", series_j}, {"partial", partial}};
}

std::string ResourceCurves::to_csv() const {
  std::ostringstream out;
  out.precision(17);
  out << "level,n,time_outcome,memory_outcome\n";
  for (const auto& s : series)
    for (const auto& p : s.points) {
      out << mitigation_level_name(s.level) << ',' << p.n << ',';
      if (p.time_outcome.defined) out << p.time_outcome.value;
      out << ',';
      if (p.memory_outcome.defined) out << p.memory_outcome.value;
      out << '\n';
    }
  return out.str();
}

ResourceCurves resource_curves(const std::vector<ExperimentRecord>& records) {
  std::vector<ExperimentRecord> filtered;
  for (const auto& r : records)
    if (!r.failed && r.plan.ensemble == EnsembleKind::bagging &&
        r.plan.mitigator == MitigatorKind::pre)
      filtered.push_back(r);

  StandardizeResult time_scores = standardize(filtered, MetricKind::time_seconds);
  StandardizeResult mem_scores = standardize(filtered, MetricKind::memory_mb);

  std::set<int> sizes;
  for (const auto& r : filtered) sizes.insert(r.plan.n);

  ResourceCurves out;
  for (MitigationLevel lvl : {MitigationLevel::estimator, MitigationLevel::ensemble}) {
    bool level_present = std::any_of(filtered.begin(), filtered.end(), [&](const auto& r) {
      return r.plan.level == lvl;
    });
    if (!level_present) {
      out.partial = true;
      continue;
    }
    ResourceSeries series;
    series.level = lvl;
    for (int n : sizes) {
      ResourcePoint point;
      point.n = n;
      auto mean_for = [&](const std::vector<StandardizedScore>& scores) -> MetricValue {
        double s = 0.0;
        std::size_t count = 0;
        for (const auto& sc : scores)
          if (sc.plan.level == lvl && sc.plan.n == n) {
            s += sc.outcome;
            ++count;
          }
        if (count == 0) return MetricValue::undefined();
        return {s / static_cast<double>(count), true};
      };
      point.time_outcome = mean_for(time_scores.scores);
      point.memory_outcome = mean_for(mem_scores.scores);
      series.points.push_back(point);
    }
    out.series.push_back(std::move(series));
  }
  return out;
}

}  // namespace fairens
