#include "fairens/splits.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "fairens/rng.hpp"

namespace fairens {

namespace {

// map each row to its stratum: bit 0 is the favorable label, bit a+1 is
// membership in protected attribute a's reference group
std::map<std::uint64_t, std::vector<std::size_t>> stratify(const Dataset& d,
                                                           const FairnessInfo& fi,
                                                           const char* who) {
  const std::size_t n = d.n_rows();
  std::vector<std::uint64_t> stratum(n, 0);
  for (std::size_t i = 0; i < n; ++i)
    stratum[i] = label_matches(d.labels, i, fi.favorable_labels) ? 1u : 0u;
  for (std::size_t a = 0; a < fi.protected_attributes.size(); ++a) {
    const auto& pa = fi.protected_attributes[a];
    int ci = d.col_index(pa.feature);
    if (ci < 0)
      throw SchemaError(std::string(who) + ": unknown protected feature '" + pa.feature + "'");
    const Column& col = d.cols[static_cast<std::size_t>(ci)];
    for (std::size_t i = 0; i < n; ++i)
      if (cell_matches(col, i, pa.reference_group)) stratum[i] |= (1ull << (a + 1));
  }
  std::map<std::uint64_t, std::vector<std::size_t>> buckets;
  for (std::size_t i = 0; i < n; ++i) buckets[stratum[i]].push_back(i);
  return buckets;
}

}  // namespace

KFoldResult stratified_kfold(const Dataset& d, const FairnessInfo& fi, std::size_t k,
                             std::uint64_t seed) {
  if (k < 2) throw ConfigError("stratified_kfold: k must be at least 2");
  if (d.n_rows() < k)
    throw ConfigError("stratified_kfold: fewer rows than folds");

  const std::size_t n = d.n_rows();
  auto buckets = stratify(d, fi, "stratified_kfold");

  KFoldResult out;
  std::vector<std::vector<std::size_t>> test_rows(k);
  Rng rng(seed);
  std::size_t ordinal = 0;
  for (auto& [key, rows] : buckets) {
    if (rows.size() < k) {
      std::ostringstream os;
      os << "stratum " << key << " has " << rows.size() << " rows, fewer than " << k
         << " folds; dealing round-robin";
      out.warnings.push_back(os.str());
    }
    rng.shuffle(rows);
    std::size_t offset = ordinal % k;
    for (std::size_t j = 0; j < rows.size(); ++j)
      test_rows[(offset + j) % k].push_back(rows[j]);
    ++ordinal;
  }

  out.folds.resize(k);
  for (std::size_t f = 0; f < k; ++f) {
    auto& t = test_rows[f];
    std::sort(t.begin(), t.end());
    std::vector<std::uint8_t> in_test(n, 0);
    for (auto r : t) in_test[r] = 1;
    out.folds[f].test = std::move(t);
    out.folds[f].train.reserve(n - out.folds[f].test.size());
    for (std::size_t i = 0; i < n; ++i)
      if (!in_test[i]) out.folds[f].train.push_back(i);
  }
  return out;
}

FoldSplit stratified_holdout(const Dataset& d, const FairnessInfo& fi, double fraction,
                             std::uint64_t seed) {
  if (!(fraction > 0.0) || !(fraction < 1.0))
    throw ConfigError("stratified_holdout: fraction must be in (0, 1)");
  auto buckets = stratify(d, fi, "stratified_holdout");

  FoldSplit out;
  Rng rng(seed);
  for (auto& [key, rows] : buckets) {
    rng.shuffle(rows);
    std::size_t take = 0;
    if (rows.size() >= 2) {
      take = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(rows.size())));
      take = std::clamp<std::size_t>(take, 1, rows.size() - 1);
    }
    for (std::size_t j = 0; j < rows.size(); ++j)
      (j < take ? out.test : out.train).push_back(rows[j]);
  }
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

}  // namespace fairens
