#include "fairens/dataset.hpp"

#include <cmath>
#include <set>
#include <sstream>

namespace fairens {

using nlohmann::json;

Column Column::numeric_col(std::vector<double> v) {
  Column c;
  c.kind = ColumnKind::numeric;
  c.num = std::move(v);
  return c;
}

Column Column::categorical_col(std::vector<std::string> v) {
  Column c;
  c.kind = ColumnKind::categorical;
  c.cat = std::move(v);
  return c;
}

bool is_missing_numeric(double v) { return std::isnan(v); }

bool is_missing_categorical(const std::string& v) { return v.empty() || v == "?"; }

bool Column::missing(std::size_t i) const {
  return kind == ColumnKind::numeric ? is_missing_numeric(num[i])
                                     : is_missing_categorical(cat[i]);
}

int Dataset::col_index(std::string_view name) const {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return static_cast<int>(i);
  return -1;
}

void Dataset::check() const {
  if (names.size() != cols.size())
    throw SchemaError("dataset: name count does not match column count");
  std::set<std::string> seen;
  for (const auto& n : names)
    if (!seen.insert(n).second)
      throw SchemaError("dataset: duplicate column name '" + n + "'");
  const std::size_t n = labels.size();
  for (std::size_t i = 0; i < cols.size(); ++i)
    if (cols[i].size() != n) {
      std::ostringstream os;
      os << "dataset: column '" << names[i] << "' has " << cols[i].size()
         << " rows, labels have " << n;
      throw SchemaError(os.str());
    }
  if (weights.size() != n)
    throw SchemaError("dataset: weight vector length does not match row count");
  for (double w : weights)
    if (!(w >= 0.0))
      throw SchemaError("dataset: weights must be non-negative and finite");
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
  Dataset out;
  out.names = names;
  out.cols.reserve(cols.size());
  for (const auto& c : cols) {
    Column nc;
    nc.kind = c.kind;
    if (c.kind == ColumnKind::numeric) {
      nc.num.reserve(rows.size());
      for (auto r : rows) nc.num.push_back(c.num[r]);
    } else {
      nc.cat.reserve(rows.size());
      for (auto r : rows) nc.cat.push_back(c.cat[r]);
    }
    out.cols.push_back(std::move(nc));
  }
  out.labels.kind = labels.kind;
  if (labels.kind == ColumnKind::numeric) {
    out.labels.num.reserve(rows.size());
    for (auto r : rows) out.labels.num.push_back(labels.num[r]);
  } else {
    out.labels.cat.reserve(rows.size());
    for (auto r : rows) out.labels.cat.push_back(labels.cat[r]);
  }
  out.weights.reserve(rows.size());
  for (auto r : rows) out.weights.push_back(weights[r]);
  return out;
}

Dataset Dataset::with_weights(std::vector<double> w) const {
  if (w.size() != n_rows())
    throw SchemaError("with_weights: weight vector length does not match row count");
  Dataset out = *this;
  out.weights = std::move(w);
  return out;
}

Matrix Dataset::feature_matrix() const {
  for (std::size_t i = 0; i < cols.size(); ++i) {
    if (cols[i].kind != ColumnKind::numeric)
      throw SchemaError("feature_matrix: column '" + names[i] +
                        "' is categorical; preprocess the dataset first");
    for (double v : cols[i].num)
      if (is_missing_numeric(v))
        throw SchemaError("feature_matrix: column '" + names[i] +
                          "' has missing values; preprocess the dataset first");
  }
  Matrix m(n_rows(), n_cols());
  for (std::size_t c = 0; c < cols.size(); ++c)
    for (std::size_t r = 0; r < cols[c].num.size(); ++r) m(r, c) = cols[c].num[r];
  return m;
}

std::vector<int> Dataset::binary_labels() const {
  if (labels.kind != ColumnKind::numeric)
    throw SchemaError("binary_labels: label column is categorical; preprocess first");
  std::vector<int> y;
  y.reserve(labels.num.size());
  for (double v : labels.num) {
    if (v == 0.0) y.push_back(0);
    else if (v == 1.0) y.push_back(1);
    else throw SchemaError("binary_labels: labels must be exactly 0 or 1; preprocess first");
  }
  return y;
}

namespace {

json cell_to_json(const Cell& c) {
  if (std::holds_alternative<double>(c)) return std::get<double>(c);
  return std::get<std::string>(c);
}

Cell cell_from_json(const json& j, const char* where) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return j.get<std::string>();
  throw ParseError(std::string(where) + ": expected a number or string");
}

json group_value_to_json(const GroupValue& g) {
  if (std::holds_alternative<double>(g)) return std::get<double>(g);
  if (std::holds_alternative<std::string>(g)) return std::get<std::string>(g);
  const auto& r = std::get<ValueRange>(g);
  return json::array({r.lo, r.hi});
}

GroupValue group_value_from_json(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return j.get<std::string>();
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return ValueRange{j[0].get<double>(), j[1].get<double>()};
  throw ParseError("reference_group entries must be numbers, strings or [lo, hi] ranges");
}

}  // namespace

json FairnessInfo::to_json() const {
  json fl = json::array();
  for (const auto& c : favorable_labels) fl.push_back(cell_to_json(c));
  json pas = json::array();
  for (const auto& pa : protected_attributes) {
    json rg = json::array();
    for (const auto& g : pa.reference_group) rg.push_back(group_value_to_json(g));
    pas.push_back({{"feature", pa.feature}, {"reference_group", rg}});
  }
  return json{{"favorable_labels", fl}, {"protected_attributes", pas}};
}

FairnessInfo FairnessInfo::from_json(const json& j) {
  FairnessInfo fi;
  if (!j.is_object() || !j.contains("favorable_labels") || !j.contains("protected_attributes"))
    throw ParseError("fairness info needs 'favorable_labels' and 'protected_attributes'");
  for (const auto& e : j.at("favorable_labels"))
    fi.favorable_labels.push_back(cell_from_json(e, "favorable_labels"));
  if (fi.favorable_labels.empty())
    throw ParseError("favorable_labels must not be empty");
  for (const auto& e : j.at("protected_attributes")) {
    ProtectedAttribute pa;
    pa.feature = e.at("feature").get<std::string>();
    for (const auto& g : e.at("reference_group"))
      pa.reference_group.push_back(group_value_from_json(g));
    if (pa.reference_group.empty())
      throw ParseError("reference_group must not be empty for feature '" + pa.feature + "'");
    fi.protected_attributes.push_back(std::move(pa));
  }
  if (fi.protected_attributes.empty())
    throw ParseError("protected_attributes must not be empty");
  return fi;
}

bool cell_matches(const Column& col, std::size_t i, const std::vector<GroupValue>& values) {
  if (col.missing(i)) return false;
  if (col.kind == ColumnKind::numeric) {
    double x = col.num[i];
    for (const auto& g : values) {
      if (std::holds_alternative<double>(g) && x == std::get<double>(g)) return true;
      if (std::holds_alternative<ValueRange>(g)) {
        const auto& r = std::get<ValueRange>(g);
        if (x >= r.lo && x <= r.hi) return true;
      }
    }
  } else {
    const std::string& x = col.cat[i];
    for (const auto& g : values)
      if (std::holds_alternative<std::string>(g) && x == std::get<std::string>(g)) return true;
  }
  return false;
}

bool label_matches(const Column& labels, std::size_t i, const std::vector<Cell>& favorable) {
  if (labels.missing(i)) return false;
  if (labels.kind == ColumnKind::numeric) {
    double x = labels.num[i];
    for (const auto& c : favorable)
      if (std::holds_alternative<double>(c) && x == std::get<double>(c)) return true;
  } else {
    const std::string& x = labels.cat[i];
    for (const auto& c : favorable)
      if (std::holds_alternative<std::string>(c) && x == std::get<std::string>(c)) return true;
  }
  return false;
}

GroupEncoding bind_groups(const Dataset& d, const FairnessInfo& fi) {
  if (fi.protected_attributes.empty())
    throw SchemaError("bind_groups: no protected attributes declared");
  const std::size_t n = d.n_rows();
  GroupEncoding enc;
  enc.priv_mask.assign(n, 1);
  enc.fav_mask.assign(n, 0);
  for (const auto& pa : fi.protected_attributes) {
    int ci = d.col_index(pa.feature);
    if (ci < 0)
      throw SchemaError("bind_groups: unknown protected feature '" + pa.feature + "'");
    const Column& col = d.cols[static_cast<std::size_t>(ci)];
    for (std::size_t i = 0; i < n; ++i)
      if (enc.priv_mask[i] && !cell_matches(col, i, pa.reference_group)) enc.priv_mask[i] = 0;
  }
  for (std::size_t i = 0; i < n; ++i)
    enc.fav_mask[i] = label_matches(d.labels, i, fi.favorable_labels) ? 1 : 0;

  std::size_t priv = 0;
  for (auto m : enc.priv_mask) priv += m;
  if (priv == 0)
    throw DegenerateGroupError("bind_groups: privileged partition is empty");
  if (priv == n)
    throw DegenerateGroupError("bind_groups: unprivileged partition is empty");
  return enc;
}

MetricValue baseline_di(const Dataset& d, const FairnessInfo& fi) {
  GroupEncoding enc = bind_groups(d, fi);
  double wp = 0, wp_fav = 0, wu = 0, wu_fav = 0;
  for (std::size_t i = 0; i < d.n_rows(); ++i) {
    double w = d.weights[i];
    if (enc.priv_mask[i]) {
      wp += w;
      if (enc.fav_mask[i]) wp_fav += w;
    } else {
      wu += w;
      if (enc.fav_mask[i]) wu_fav += w;
    }
  }
  if (wp <= 0.0 || wu <= 0.0)
    throw DegenerateGroupError("baseline_di: a partition has zero total weight");
  double rate_p = wp_fav / wp;
  double rate_u = wu_fav / wu;
  if (rate_p == 0.0) return MetricValue::undefined();
  return MetricValue{rate_u / rate_p, true};
}

}  // namespace fairens
