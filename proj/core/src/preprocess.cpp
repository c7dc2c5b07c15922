#include "fairens/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace fairens {

using nlohmann::json;

double Standardizer::apply(const std::string& column, double x) const {
  auto it = numeric.find(column);
  if (it == numeric.end())
    throw SchemaError("standardizer: unknown column '" + column + "'");
  if (is_missing_numeric(x)) x = it->second.mean;
  return (x - it->second.mean) / it->second.stddev;
}

json Standardizer::to_json() const {
  json num = json::object();
  for (const auto& [name, st] : numeric)
    num[name] = {{"mean", st.mean}, {"stddev", st.stddev}, {"constant", st.constant}};
  json cats = json::object();
  for (const auto& [name, vocab] : categories) cats[name] = vocab;
  return json{{"numeric", num}, {"categories", cats}};
}

Standardizer Standardizer::from_json(const json& j) {
  Standardizer s;
  for (const auto& [name, st] : j.at("numeric").items())
    s.numeric[name] = ColumnStats{st.at("mean").get<double>(), st.at("stddev").get<double>(),
                                  st.at("constant").get<bool>()};
  for (const auto& [name, vocab] : j.at("categories").items())
    s.categories[name] = vocab.get<std::vector<std::string>>();
  return s;
}

PreprocessResult preprocess(const Dataset& d, const FairnessInfo& fi,
                            const std::vector<std::string>& drop,
                            const std::optional<Standardizer>& fitted) {
  d.check();
  std::set<std::string> dropset(drop.begin(), drop.end());
  std::set<std::string> protected_names;
  for (const auto& pa : fi.protected_attributes) {
    if (d.col_index(pa.feature) < 0)
      throw SchemaError("preprocess: unknown protected feature '" + pa.feature + "'");
    if (dropset.count(pa.feature))
      throw SchemaError("preprocess: cannot drop protected feature '" + pa.feature + "'");
    protected_names.insert(pa.feature);
  }
  for (const auto& name : dropset)
    if (d.col_index(name) < 0)
      throw SchemaError("preprocess: cannot drop unknown column '" + name + "'");

  // keep rows whose label and protected attributes are all present
  std::vector<std::size_t> keep;
  keep.reserve(d.n_rows());
  for (std::size_t i = 0; i < d.n_rows(); ++i) {
    bool ok = !d.labels.missing(i);
    for (const auto& pa : fi.protected_attributes) {
      if (!ok) break;
      const Column& col = d.cols[static_cast<std::size_t>(d.col_index(pa.feature))];
      if (col.missing(i)) ok = false;
    }
    if (ok) keep.push_back(i);
  }

  PreprocessResult out;
  out.report.dropped_rows = d.n_rows() - keep.size();
  if (keep.empty()) throw SchemaError("preprocess: all rows were dropped");
  Dataset base = d.subset(keep);

  Standardizer stats;
  const bool refit = !fitted.has_value();
  if (!refit) stats = *fitted;

  Dataset res;
  res.weights = base.weights;
  const std::size_t n = base.n_rows();

  for (std::size_t c = 0; c < base.cols.size(); ++c) {
    const std::string& name = base.names[c];
    if (dropset.count(name)) continue;
    const Column& col = base.cols[c];

    if (protected_names.count(name)) {
      const ProtectedAttribute* pa = nullptr;
      for (const auto& p : fi.protected_attributes)
        if (p.feature == name) pa = &p;
      std::vector<double> bin(n);
      for (std::size_t i = 0; i < n; ++i)
        bin[i] = cell_matches(col, i, pa->reference_group) ? 1.0 : 0.0;
      res.names.push_back(name);
      res.cols.push_back(Column::numeric_col(std::move(bin)));
      continue;
    }

    if (col.kind == ColumnKind::numeric) {
      ColumnStats st;
      if (refit) {
        double sum = 0.0;
        std::size_t cnt = 0;
        for (double v : col.num)
          if (!is_missing_numeric(v)) { sum += v; ++cnt; }
        if (cnt == 0) {
          st.mean = 0.0;
          st.constant = true;
          out.report.warnings.push_back("column '" + name + "' is entirely missing");
        } else {
          st.mean = sum / static_cast<double>(cnt);
          double ss = 0.0;
          for (double v : col.num)
            if (!is_missing_numeric(v)) ss += (v - st.mean) * (v - st.mean);
          double var = ss / static_cast<double>(cnt);
          if (var == 0.0) {
            st.constant = true;
            st.stddev = 1.0;
          } else {
            st.stddev = std::sqrt(var);
          }
        }
        stats.numeric[name] = st;
      } else {
        auto it = stats.numeric.find(name);
        if (it == stats.numeric.end())
          throw SchemaError("preprocess: standardizer has no stats for column '" + name + "'");
        st = it->second;
      }
      if (st.constant) out.report.constant_columns.push_back(name);
      std::vector<double> z(n);
      for (std::size_t i = 0; i < n; ++i) {
        double v = is_missing_numeric(col.num[i]) ? st.mean : col.num[i];
        z[i] = (v - st.mean) / st.stddev;
      }
      res.names.push_back(name);
      res.cols.push_back(Column::numeric_col(std::move(z)));
      continue;
    }

    // categorical, non-protected: one-hot on the training vocabulary
    std::vector<std::string> vocab;
    if (refit) {
      std::set<std::string> uniq;
      for (const auto& v : col.cat)
        if (!is_missing_categorical(v)) uniq.insert(v);
      vocab.assign(uniq.begin(), uniq.end());
      stats.categories[name] = vocab;
    } else {
      auto it = stats.categories.find(name);
      if (it == stats.categories.end())
        throw SchemaError("preprocess: standardizer has no vocabulary for column '" + name + "'");
      vocab = it->second;
    }
    for (const auto& cat : vocab) {
      std::vector<double> ind(n);
      for (std::size_t i = 0; i < n; ++i) ind[i] = (col.cat[i] == cat) ? 1.0 : 0.0;
      res.names.push_back(name + "=" + cat);
      res.cols.push_back(Column::numeric_col(std::move(ind)));
    }
  }

  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i)
    y[i] = label_matches(base.labels, i, fi.favorable_labels) ? 1.0 : 0.0;
  res.labels = Column::numeric_col(std::move(y));
  res.check();

  FairnessInfo rebased;
  rebased.favorable_labels = {Cell{1.0}};
  for (const auto& pa : fi.protected_attributes)
    rebased.protected_attributes.push_back({pa.feature, {GroupValue{1.0}}});

  out.data = std::move(res);
  out.fairness_info = std::move(rebased);
  out.standardizer = std::move(stats);
  return out;
}

}  // namespace fairens
