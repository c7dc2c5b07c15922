#pragma once
// Shared fixtures and brute-force reference implementations. The oracles
// re-derive the documented behavior from first principles so the library
// is compared against an independent second opinion.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "fairens/analysis.hpp"
#include "fairens/dataset.hpp"
#include "fairens/guidance.hpp"
#include "fairens/harness.hpp"
#include "fairens/metrics.hpp"
#include "fairens/plan.hpp"
#include "fairens/rng.hpp"
#include "fairens/synthetic.hpp"

namespace testhelp {

using namespace fairens;

inline FairnessInfo fairness_for(const std::string& column = "grp") {
  FairnessInfo fi;
  fi.favorable_labels = {Cell{1.0}};
  fi.protected_attributes = {{column, {GroupValue{1.0}}}};
  return fi;
}

/// Dataset with a numeric group column "grp", numeric labels and optional
/// extra numeric features f0, f1, ...
inline Dataset make_case(const std::vector<int>& grp, const std::vector<int>& y,
                         const std::vector<std::vector<double>>& features = {},
                         std::vector<double> weights = {}) {
  Dataset d;
  std::vector<double> g(grp.begin(), grp.end());
  d.names.push_back("grp");
  d.cols.push_back(Column::numeric_col(std::move(g)));
  for (std::size_t j = 0; j < features.size(); ++j) {
    d.names.push_back("f" + std::to_string(j));
    d.cols.push_back(Column::numeric_col(features[j]));
  }
  std::vector<double> lab(y.begin(), y.end());
  d.labels = Column::numeric_col(std::move(lab));
  if (weights.empty()) weights.assign(y.size(), 1.0);
  d.weights = std::move(weights);
  return d;
}

// ---------------------------------------------------------------------------
// Metric oracle
// ---------------------------------------------------------------------------

struct MetricCase {
  std::vector<int> grp;
  std::vector<int> y_true;
  std::vector<int> y_pred;
  std::vector<double> weights;
};

/// Random case with both groups present. Rows in [2, max_rows]; weights
/// are sometimes non-uniform and may be zero for single rows.
inline MetricCase random_metric_case(Rng& rng, std::size_t max_rows = 12) {
  MetricCase c;
  std::size_t n = 2 + rng.uniform_index(max_rows - 1);
  c.grp.resize(n);
  c.y_true.resize(n);
  c.y_pred.resize(n);
  c.weights.resize(n);
  bool uniform = rng.uniform01() < 0.5;
  static const double pool[] = {0.0, 0.5, 1.0, 2.0};
  for (std::size_t i = 0; i < n; ++i) {
    c.grp[i] = rng.uniform01() < 0.5 ? 1 : 0;
    c.y_true[i] = rng.uniform01() < 0.5 ? 1 : 0;
    c.y_pred[i] = rng.uniform01() < 0.5 ? 1 : 0;
    c.weights[i] = uniform ? 1.0 : pool[rng.uniform_index(4)];
  }
  c.grp[0] = 1;
  c.grp[1] = 0;
  return c;
}

/// Exhaustive-count reference for the fairness and predictive metrics,
/// accumulating each quantity in its own pass.
inline MetricValue oracle_metric(const MetricCase& c, MetricKind kind) {
  auto wsum = [&](auto pred) {
    double s = 0.0;
    for (std::size_t i = 0; i < c.grp.size(); ++i)
      if (pred(i)) s += c.weights[i];
    return s;
  };
  auto in_grp = [&](std::size_t i, int g) { return c.grp[i] == g; };

  double n_p = wsum([&](std::size_t i) { return in_grp(i, 1); });
  double n_u = wsum([&](std::size_t i) { return in_grp(i, 0); });
  double sel_p = wsum([&](std::size_t i) { return in_grp(i, 1) && c.y_pred[i] == 1; });
  double sel_u = wsum([&](std::size_t i) { return in_grp(i, 0) && c.y_pred[i] == 1; });
  double pos_p = wsum([&](std::size_t i) { return in_grp(i, 1) && c.y_true[i] == 1; });
  double pos_u = wsum([&](std::size_t i) { return in_grp(i, 0) && c.y_true[i] == 1; });
  double neg_p = wsum([&](std::size_t i) { return in_grp(i, 1) && c.y_true[i] == 0; });
  double neg_u = wsum([&](std::size_t i) { return in_grp(i, 0) && c.y_true[i] == 0; });
  double tp_p = wsum([&](std::size_t i) {
    return in_grp(i, 1) && c.y_true[i] == 1 && c.y_pred[i] == 1;
  });
  double tp_u = wsum([&](std::size_t i) {
    return in_grp(i, 0) && c.y_true[i] == 1 && c.y_pred[i] == 1;
  });
  double fp_p = wsum([&](std::size_t i) {
    return in_grp(i, 1) && c.y_true[i] == 0 && c.y_pred[i] == 1;
  });
  double fp_u = wsum([&](std::size_t i) {
    return in_grp(i, 0) && c.y_true[i] == 0 && c.y_pred[i] == 1;
  });

  double tp = tp_p + tp_u;
  double fp = fp_p + fp_u;
  double pos = pos_p + pos_u;
  double n = n_p + n_u;
  double correct = wsum([&](std::size_t i) { return c.y_true[i] == c.y_pred[i]; });

  switch (kind) {
    case MetricKind::disparate_impact: {
      if (n_p <= 0.0 || n_u <= 0.0) return MetricValue::undefined();
      double rp = sel_p / n_p, ru = sel_u / n_u;
      if (rp == 0.0) return MetricValue::undefined();
      return {ru / rp, true};
    }
    case MetricKind::statistical_parity_difference: {
      if (n_p <= 0.0 || n_u <= 0.0) return MetricValue::undefined();
      return {sel_u / n_u - sel_p / n_p, true};
    }
    case MetricKind::equal_opportunity_difference: {
      if (pos_p <= 0.0 || pos_u <= 0.0) return MetricValue::undefined();
      return {tp_u / pos_u - tp_p / pos_p, true};
    }
    case MetricKind::average_odds_difference: {
      if (pos_p <= 0.0 || pos_u <= 0.0 || neg_p <= 0.0 || neg_u <= 0.0)
        return MetricValue::undefined();
      double tpr_gap = tp_u / pos_u - tp_p / pos_p;
      double fpr_gap = fp_u / neg_u - fp_p / neg_p;
      return {0.5 * (fpr_gap + tpr_gap), true};
    }
    case MetricKind::accuracy: {
      if (n <= 0.0) return MetricValue::undefined();
      return {correct / n, true};
    }
    case MetricKind::precision:
      return {tp + fp > 0.0 ? tp / (tp + fp) : 0.0, true};
    case MetricKind::recall:
      return {pos > 0.0 ? tp / pos : 0.0, true};
    case MetricKind::f1: {
      double prec = tp + fp > 0.0 ? tp / (tp + fp) : 0.0;
      double rec = pos > 0.0 ? tp / pos : 0.0;
      if (prec + rec == 0.0) return {0.0, true};
      return {2.0 * prec * rec / (prec + rec), true};
    }
    default:
      return MetricValue::undefined();
  }
}

/// Direct weighted count of the label disparate impact.
inline MetricValue oracle_baseline_di(const MetricCase& c) {
  MetricCase as_pred = c;
  as_pred.y_pred = c.y_true;
  return oracle_metric(as_pred, MetricKind::disparate_impact);
}

// ---------------------------------------------------------------------------
// Selection oracle
// ---------------------------------------------------------------------------

struct OracleSelection {
  nlohmann::json chosen;  // canonical config JSON
  bool relaxed = false;
  std::vector<int> dropped;
  bool all_failed = false;
};

/// Step-by-step re-derivation of the four-filter selection.
inline OracleSelection oracle_grid_select(const std::vector<GridCandidate>& cands,
                                          const SelectionPolicy& pol) {
  struct Row {
    std::size_t index;
    std::string key;
    bool usable = false;
    bool has_di = false;
    double di = 0.0, prec = 0.0, rec = 0.0, f1 = 0.0;
  };
  auto mean = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
  };
  auto median = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    std::size_t m = v.size() / 2;
    return v.size() % 2 == 1 ? v[m] : 0.5 * (v[m - 1] + v[m]);
  };

  std::vector<Row> rows;
  for (std::size_t i = 0; i < cands.size(); ++i) {
    Row r;
    r.index = i;
    r.key = cands[i].config.to_json().dump();
    std::vector<double> di, prec, rec, f1;
    for (const auto& record : cands[i].records) {
      if (record.failed) continue;
      auto grab = [&](MetricKind k, std::vector<double>& out) {
        MetricValue v = record.metric(k);
        if (v.defined) out.push_back(v.value);
      };
      grab(MetricKind::disparate_impact, di);
      grab(MetricKind::precision, prec);
      grab(MetricKind::recall, rec);
      grab(MetricKind::f1, f1);
    }
    r.usable = !prec.empty() && !rec.empty() && !f1.empty();
    if (!di.empty()) {
      r.has_di = true;
      r.di = mean(di);
    }
    if (r.usable) {
      r.prec = mean(prec);
      r.rec = mean(rec);
      r.f1 = mean(f1);
    }
    rows.push_back(std::move(r));
  }

  std::vector<Row> usable;
  for (const auto& r : rows)
    if (r.usable) usable.push_back(r);
  if (usable.empty()) return {{}, false, {}, true};

  auto pass1 = [&](const Row& r) {
    return r.has_di && r.di >= pol.di_low && r.di <= pol.di_high;
  };
  auto pass2 = [](const Row& r) { return r.prec > 0.0; };
  auto pass3 = [&](const std::vector<Row>& in) {
    if (in.size() <= 1) return in;
    std::vector<double> f1s;
    for (const auto& r : in) f1s.push_back(r.f1);
    double threshold = std::max(mean(f1s), median(f1s));
    std::vector<Row> out;
    for (const auto& r : in)
      if (r.f1 > threshold) out.push_back(r);
    return out;
  };

  std::vector<Row> p12;
  for (const auto& r : usable)
    if (pass1(r) && pass2(r)) p12.push_back(r);

  OracleSelection result;
  std::vector<Row> survivors = pass3(p12);
  if (survivors.empty()) {
    result.relaxed = true;
    result.dropped = {3};
    survivors = p12;
  }
  if (survivors.empty()) {
    result.dropped = {3, 1};
    for (const auto& r : usable)
      if (pass2(r)) survivors.push_back(r);
  }
  if (survivors.empty()) {
    result.dropped = {3, 1, 2};
    survivors = usable;
  }

  double best_obj = -1.0;
  for (const auto& r : survivors)
    best_obj = std::max(best_obj, pol.prefer_precision ? r.prec : r.rec);
  const Row* best = nullptr;
  for (const auto& r : survivors) {
    double obj = pol.prefer_precision ? r.prec : r.rec;
    if (obj != best_obj) continue;
    if (!best || r.key < best->key) best = &r;
  }
  result.chosen = cands[best->index].config.to_json();
  return result;
}

/// Randomized candidate tables with deliberate collisions: boundary DI
/// means, zero precision, duplicate configs, failed and undefined records.
inline std::vector<GridCandidate> random_candidates(Rng& rng, const SelectionPolicy& pol) {
  std::size_t n = 1 + rng.uniform_index(6);
  std::vector<GridCandidate> out;
  const double di_pool[] = {pol.di_low, pol.di_high, 0.5 * (pol.di_low + pol.di_high),
                            0.3, 2.0, 1.0};
  const double prec_pool[] = {0.0, 0.25, 0.5, 0.5, 0.75};
  const double rec_pool[] = {0.2, 0.4, 0.4, 0.9};
  const double f1_pool[] = {0.1, 0.3, 0.3, 0.6, 0.6};
  for (std::size_t i = 0; i < n; ++i) {
    GridCandidate c;
    c.config.name = std::string(1, static_cast<char>('a' + rng.uniform_index(3)));
    c.config.hyperparameters = {{"p", static_cast<int>(rng.uniform_index(3))}};
    std::size_t records = 1 + rng.uniform_index(4);
    for (std::size_t k = 0; k < records; ++k) {
      ExperimentRecord r;
      r.dataset = "d";
      r.trial = static_cast<int>(k);
      if (rng.uniform01() < 0.15) {
        r.failed = true;
        r.error = "synthetic failure";
      } else {
        auto put = [&](MetricKind kind, double v, bool defined) {
          r.metrics[metric_name(kind)] = defined ? MetricValue{v, true}
                                                 : MetricValue::undefined();
        };
        put(MetricKind::disparate_impact, di_pool[rng.uniform_index(6)],
            rng.uniform01() < 0.85);
        put(MetricKind::precision, prec_pool[rng.uniform_index(5)], true);
        put(MetricKind::recall, rec_pool[rng.uniform_index(4)], true);
        put(MetricKind::f1, f1_pool[rng.uniform_index(5)], true);
      }
      c.records.push_back(std::move(r));
    }
    out.push_back(std::move(c));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Standardization oracle
// ---------------------------------------------------------------------------

struct OracleScore {
  std::string dataset;
  std::string plan_key;
  double outcome = 0.0;
  double volatility = 0.0;
  bool degenerate_outcome = false;
  bool degenerate_volatility = false;
};

struct OracleStandardize {
  std::vector<OracleScore> scores;
  std::vector<std::string> degenerate_groups;
};

inline OracleStandardize oracle_standardize(const std::vector<ExperimentRecord>& records,
                                            MetricKind kind) {
  struct Group {
    std::string id;
    std::vector<std::string> order;
    std::map<std::string, std::vector<double>> values;
  };
  std::vector<Group> groups;
  auto group_of = [&](const std::string& id) -> Group& {
    for (auto& g : groups)
      if (g.id == id) return g;
    groups.push_back({id, {}, {}});
    return groups.back();
  };

  for (const auto& r : records) {
    if (r.failed) continue;
    MetricValue v = r.metric(kind);
    if (!v.defined) continue;
    if (kind == MetricKind::disparate_impact && v.value == 0.0) continue;
    if (kind == MetricKind::f1 && v.value == 0.0) continue;
    double folded = v.value;
    MetricFamily fam = metric_family(kind);
    if (fam == MetricFamily::ratio && folded > 1.0) folded = 1.0 / folded;
    if (fam == MetricFamily::difference) folded = std::fabs(folded);
    Group& g = group_of(r.dataset);
    std::string pk = r.plan.key();
    if (!g.values.count(pk)) g.order.push_back(pk);
    g.values[pk].push_back(folded);
  }

  OracleStandardize out;
  for (const auto& g : groups) {
    std::vector<double> means, stds;
    for (const auto& pk : g.order) {
      const auto& vals = g.values.at(pk);
      double m = 0.0;
      for (double x : vals) m += x;
      m /= static_cast<double>(vals.size());
      double sd = 0.0;
      if (vals.size() > 1) {
        double ss = 0.0;
        for (double x : vals) ss += (x - m) * (x - m);
        sd = std::sqrt(ss / static_cast<double>(vals.size() - 1));
      }
      means.push_back(m);
      stds.push_back(sd);
    }
    auto scale = [](const std::vector<double>& v, std::vector<double>& scaled) {
      double lo = *std::min_element(v.begin(), v.end());
      double hi = *std::max_element(v.begin(), v.end());
      bool degenerate = hi == lo;
      scaled.resize(v.size());
      for (std::size_t i = 0; i < v.size(); ++i)
        scaled[i] = degenerate ? 0.0 : (v[i] - lo) / (hi - lo);
      return degenerate;
    };
    std::vector<double> outcome, volatility;
    bool deg_o = scale(means, outcome);
    bool deg_v = scale(stds, volatility);
    if (deg_o) out.degenerate_groups.push_back(g.id + "/" + metric_name(kind) + "/outcome");
    if (deg_v) out.degenerate_groups.push_back(g.id + "/" + metric_name(kind) + "/volatility");
    for (std::size_t i = 0; i < g.order.size(); ++i)
      out.scores.push_back(
          {g.id, g.order[i], outcome[i], volatility[i], deg_o, deg_v});
  }
  return out;
}

/// Distinct plan shapes for randomized record tables. Shapes 4 and 5
/// share a notation but carry different configs, so they have distinct
/// keys under one display string.
inline std::vector<MitigationPlan> sample_plans() {
  std::vector<MitigationPlan> plans;
  {
    MitigationPlan p;
    plans.push_back(p);
  }
  {
    MitigationPlan p;
    p.mitigator = MitigatorKind::pre;
    p.config = {"reweighing", nlohmann::json::object()};
    plans.push_back(p);
  }
  {
    MitigationPlan p;
    p.ensemble = EnsembleKind::bagging;
    p.n = 5;
    plans.push_back(p);
  }
  {
    MitigationPlan p;
    p.ensemble = EnsembleKind::boosting;
    p.n = 10;
    p.mitigator = MitigatorKind::pre;
    p.config = {"di_remover", {{"repair_level", 0.8}}};
    plans.push_back(p);
  }
  {
    MitigationPlan p;
    p.ensemble = EnsembleKind::bagging;
    p.n = 5;
    p.mitigator = MitigatorKind::pre;
    p.config = {"di_remover", {{"repair_level", 0.4}}};
    plans.push_back(p);
  }
  {
    MitigationPlan p;
    p.ensemble = EnsembleKind::bagging;
    p.n = 5;
    p.mitigator = MitigatorKind::pre;
    p.config = {"di_remover", {{"repair_level", 1.0}}};
    plans.push_back(p);
  }
  {
    MitigationPlan p;
    p.ensemble = EnsembleKind::voting;
    p.voting_mode = "soft";
    p.mitigator = MitigatorKind::post;
    p.level = MitigationLevel::ensemble;
    p.config = {"calibrated_eq_odds", {{"cost_constraint", "weighted"}}};
    plans.push_back(p);
  }
  return plans;
}

/// Record table with trivial values, undefined cells, sign flips, ratio
/// folds and occasional failures across several datasets and plans.
inline std::vector<ExperimentRecord> random_records(Rng& rng, std::size_t n_datasets = 3,
                                                    std::size_t reps = 3) {
  const auto plans = sample_plans();
  const double di_pool[] = {0.0, 0.4, 0.8, 1.0, 1.6, 2.5};
  const double f1_pool[] = {0.0, 0.2, 0.5, 0.5, 0.9};
  const double spd_pool[] = {-0.3, -0.1, 0.0, 0.2};
  const double time_pool[] = {0.01, 0.05, 0.2};
  std::vector<ExperimentRecord> out;
  for (std::size_t d = 0; d < n_datasets; ++d) {
    for (std::size_t p = 0; p < plans.size(); ++p) {
      if (rng.uniform01() < 0.1) continue;  // plan absent from this dataset
      for (std::size_t k = 0; k < reps; ++k) {
        ExperimentRecord r;
        r.dataset = "ds" + std::to_string(d);
        r.plan = plans[p];
        r.trial = static_cast<int>(k);
        r.fold = 0;
        if (rng.uniform01() < 0.1) {
          r.failed = true;
          r.error = "synthetic failure";
          out.push_back(std::move(r));
          continue;
        }
        auto put = [&](MetricKind kind, double v, bool defined = true) {
          r.metrics[metric_name(kind)] =
              defined ? MetricValue{v, true} : MetricValue::undefined();
        };
        put(MetricKind::disparate_impact, di_pool[rng.uniform_index(6)],
            rng.uniform01() < 0.9);
        put(MetricKind::f1, f1_pool[rng.uniform_index(5)]);
        put(MetricKind::statistical_parity_difference, spd_pool[rng.uniform_index(4)],
            rng.uniform01() < 0.9);
        put(MetricKind::average_odds_difference, spd_pool[rng.uniform_index(4)],
            rng.uniform01() < 0.8);
        put(MetricKind::equal_opportunity_difference, spd_pool[rng.uniform_index(4)],
            rng.uniform01() < 0.8);
        put(MetricKind::accuracy, 0.5 + 0.1 * static_cast<double>(rng.uniform_index(5)));
        put(MetricKind::precision, f1_pool[rng.uniform_index(5)]);
        put(MetricKind::recall, f1_pool[rng.uniform_index(5)]);
        if (rng.uniform01() < 0.8)
          r.time_seconds = {time_pool[rng.uniform_index(3)], true};
        out.push_back(std::move(r));
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Guidance oracle
// ---------------------------------------------------------------------------

/// Survivors re-derived: plans carrying both target metrics, ranked per
/// metric (descending outcome, ties by notation then key), kept when in
/// the top ceil(0.33 n) of both rankings.
inline std::set<std::string> oracle_survivor_keys(const std::vector<StandardizedScore>& scores,
                                                  const std::string& dataset) {
  struct Entry {
    std::string key, notation;
    double di = 0.0, f1 = 0.0;
    bool has_di = false, has_f1 = false;
  };
  std::map<std::string, Entry> entries;
  for (const auto& s : scores) {
    if (s.dataset != dataset) continue;
    if (s.metric != MetricKind::disparate_impact && s.metric != MetricKind::f1) continue;
    Entry& e = entries[s.plan.key()];
    e.key = s.plan.key();
    e.notation = s.plan.notation();
    if (s.metric == MetricKind::disparate_impact) {
      e.di = s.outcome;
      e.has_di = true;
    } else {
      e.f1 = s.outcome;
      e.has_f1 = true;
    }
  }
  std::vector<Entry> both;
  for (const auto& [k, e] : entries)
    if (e.has_di && e.has_f1) both.push_back(e);
  if (both.empty()) return {};
  std::size_t keep = static_cast<std::size_t>(
      std::ceil(0.33 * static_cast<double>(both.size())));
  auto top = [&](auto value_of) {
    std::vector<Entry> order = both;
    std::sort(order.begin(), order.end(), [&](const Entry& a, const Entry& b) {
      if (value_of(a) != value_of(b)) return value_of(a) > value_of(b);
      if (a.notation != b.notation) return a.notation < b.notation;
      return a.key < b.key;
    });
    std::set<std::string> kept;
    for (std::size_t i = 0; i < keep && i < order.size(); ++i) kept.insert(order[i].key);
    return kept;
  };
  std::set<std::string> top_di = top([](const Entry& e) { return e.di; });
  std::set<std::string> top_f1 = top([](const Entry& e) { return e.f1; });
  std::set<std::string> out;
  for (const auto& k : top_di)
    if (top_f1.count(k)) out.insert(k);
  return out;
}

struct OracleQuadrant {
  std::vector<std::string> datasets;
  std::map<std::string, std::vector<GuidanceEntry>> top_outcome;
  std::map<std::string, std::vector<GuidanceEntry>> top_volatility;
};

inline std::array<OracleQuadrant, 4> oracle_guidance(
    const std::vector<StandardizedScore>& scores, const std::vector<DatasetMeta>& meta,
    const GuidanceOptions& opt) {
  std::array<OracleQuadrant, 4> quads;
  std::set<std::string> present;
  for (const auto& s : scores) present.insert(s.dataset);

  struct Bucketed {
    std::size_t quadrant;
    std::string dataset;
    std::set<std::string> survivors;
  };
  std::vector<Bucketed> buckets;
  for (const auto& m : meta) {
    if (!present.count(m.id)) continue;
    bool large = m.rows > opt.large_rows_threshold;
    MetricValue di = symmetrize(m.baseline_di, MetricKind::disparate_impact);
    bool unfair = di.defined && di.value < opt.very_unfair_di;
    std::size_t q = (large ? 2u : 0u) + (unfair ? 1u : 0u);
    quads[q].datasets.push_back(m.id);
    buckets.push_back({q, m.id, oracle_survivor_keys(scores, m.id)});
  }

  std::vector<MetricKind> kinds;
  for (MetricKind k : all_metrics()) {
    bool found = false;
    for (const auto& s : scores)
      if (s.metric == k) found = true;
    if (found) kinds.push_back(k);
  }

  auto mean = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
  };

  for (std::size_t q = 0; q < 4; ++q) {
    for (MetricKind kind : kinds) {
      std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> agg;
      for (const auto& b : buckets) {
        if (b.quadrant != q) continue;
        std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> local;
        for (const auto& s : scores) {
          if (s.dataset != b.dataset || s.metric != kind) continue;
          if (!b.survivors.count(s.plan.key())) continue;
          auto& slot = local[s.plan.notation()];
          slot.first.push_back(s.outcome);
          slot.second.push_back(s.volatility);
        }
        for (const auto& [notation, vals] : local) {
          agg[notation].first.push_back(mean(vals.first));
          agg[notation].second.push_back(mean(vals.second));
        }
      }
      if (agg.empty()) continue;
      std::vector<GuidanceEntry> outcome, volatility;
      for (const auto& [notation, acc] : agg) {
        outcome.push_back({notation, mean(acc.first)});
        volatility.push_back({notation, mean(acc.second)});
      }
      MetricFamily fam = metric_family(kind);
      bool minimize = fam == MetricFamily::difference || fam == MetricFamily::resource;
      std::sort(outcome.begin(), outcome.end(), [&](const auto& a, const auto& b) {
        if (a.score != b.score) return minimize ? a.score < b.score : a.score > b.score;
        return a.notation < b.notation;
      });
      std::sort(volatility.begin(), volatility.end(), [](const auto& a, const auto& b) {
        if (a.score != b.score) return a.score < b.score;
        return a.notation < b.notation;
      });
      if (outcome.size() > opt.top_k) outcome.resize(opt.top_k);
      if (volatility.size() > opt.top_k) volatility.resize(opt.top_k);
      quads[q].top_outcome[metric_name(kind)] = std::move(outcome);
      quads[q].top_volatility[metric_name(kind)] = std::move(volatility);
    }
  }
  return quads;
}

/// Random dataset facts spanning all four quadrants, including undefined
/// baselines and threshold-boundary row counts.
inline std::vector<DatasetMeta> random_meta(Rng& rng, std::size_t n_datasets,
                                            const GuidanceOptions& opt) {
  std::vector<DatasetMeta> meta;
  for (std::size_t d = 0; d < n_datasets; ++d) {
    DatasetMeta m;
    m.id = "ds" + std::to_string(d);
    const std::size_t rows_pool[] = {opt.large_rows_threshold,
                                     opt.large_rows_threshold + 1, 100, 20000};
    m.rows = rows_pool[rng.uniform_index(4)];
    double r = rng.uniform01();
    if (r < 0.15)
      m.baseline_di = MetricValue::undefined();
    else if (r < 0.5)
      m.baseline_di = {opt.very_unfair_di * 0.6, true};
    else if (r < 0.65)
      m.baseline_di = {opt.very_unfair_di, true};
    else
      m.baseline_di = {0.9, true};
    meta.push_back(std::move(m));
  }
  return meta;
}

// ---------------------------------------------------------------------------
// Composition grid fixture
// ---------------------------------------------------------------------------

/// Cell identity after projecting away sizes, modes and configs.
/// stacking_target: 0 none, 1 base members, 2 final estimator.
struct GridCell {
  EnsembleKind ensemble;
  MitigatorKind mitigator;
  MitigationLevel level;
  int stacking_target;

  auto operator<=>(const GridCell&) const = default;
};

/// The mitigated cells of the published combination figure, transcribed
/// by hand: five placements for each homogeneous ensemble and for
/// voting, eight for stacking (three base-side, three final-side, two
/// whole-ensemble).
inline std::vector<GridCell> figure_mitigated_cells() {
  using E = EnsembleKind;
  using M = MitigatorKind;
  using L = MitigationLevel;
  std::vector<GridCell> cells;
  for (E e : {E::bagging, E::boosting, E::voting}) {
    cells.push_back({e, M::pre, L::estimator, 0});
    cells.push_back({e, M::pre, L::ensemble, 0});
    cells.push_back({e, M::in, L::estimator, 0});
    cells.push_back({e, M::post, L::estimator, 0});
    cells.push_back({e, M::post, L::ensemble, 0});
  }
  cells.push_back({E::stacking, M::pre, L::estimator, 1});
  cells.push_back({E::stacking, M::in, L::estimator, 1});
  cells.push_back({E::stacking, M::post, L::estimator, 1});
  cells.push_back({E::stacking, M::pre, L::estimator, 2});
  cells.push_back({E::stacking, M::in, L::estimator, 2});
  cells.push_back({E::stacking, M::post, L::estimator, 2});
  cells.push_back({E::stacking, M::pre, L::ensemble, 0});
  cells.push_back({E::stacking, M::post, L::ensemble, 0});
  return cells;
}

/// The full accepted universe: the mitigated figure cells plus the
/// unmitigated baselines (bare estimator, each bare ensemble) and the
/// three single-estimator mitigations.
inline std::set<GridCell> expected_accepted_cells() {
  using E = EnsembleKind;
  using M = MitigatorKind;
  using L = MitigationLevel;
  std::set<GridCell> cells;
  for (const auto& c : figure_mitigated_cells()) cells.insert(c);
  cells.insert({E::none, M::none, L::estimator, 0});
  cells.insert({E::none, M::pre, L::estimator, 0});
  cells.insert({E::none, M::in, L::estimator, 0});
  cells.insert({E::none, M::post, L::estimator, 0});
  for (E e : {E::bagging, E::boosting, E::voting, E::stacking})
    cells.insert({e, M::none, L::estimator, 0});
  return cells;
}

/// Every structural combination of the plan fields (sizes fixed to a
/// representative value, configs left empty).
inline std::vector<MitigationPlan> shape_universe() {
  std::vector<MitigationPlan> out;
  using E = EnsembleKind;
  using M = MitigatorKind;
  using L = MitigationLevel;
  for (E e : {E::none, E::bagging, E::boosting, E::voting, E::stacking})
    for (M m : {M::none, M::pre, M::in, M::post})
      for (L l : {L::estimator, L::ensemble})
        for (int n : {0, 5})
          for (bool pt : {false, true})
            for (bool mb : {false, true})
              for (bool mf : {false, true})
                for (const char* mode : {"", "soft", "hard"}) {
                  MitigationPlan p;
                  p.ensemble = e;
                  p.mitigator = m;
                  p.level = l;
                  p.n = n;
                  p.passthrough = pt;
                  p.mitigate_base = mb;
                  p.mitigate_final = mf;
                  p.voting_mode = mode;
                  out.push_back(p);
                }
  return out;
}

inline GridCell cell_of(const MitigationPlan& p) {
  int target = 0;
  if (p.ensemble == EnsembleKind::stacking && p.level == MitigationLevel::estimator) {
    if (p.mitigate_base) target = 1;
    if (p.mitigate_final) target = 2;
  }
  return {p.ensemble, p.mitigator, p.level, target};
}

}  // namespace testhelp
