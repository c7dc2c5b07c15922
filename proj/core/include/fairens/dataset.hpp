#pragma once
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "fairens/errors.hpp"
#include "fairens/matrix.hpp"
#include "fairens/metric_value.hpp"

namespace fairens {

enum class ColumnKind { numeric, categorical };

/// One feature column. Numeric columns use `num` (NaN marks a missing
/// cell), categorical columns use `cat` (empty string or "?" marks a
/// missing cell).
struct Column {
  ColumnKind kind = ColumnKind::numeric;
  std::vector<double> num;
  std::vector<std::string> cat;

  static Column numeric_col(std::vector<double> v);
  static Column categorical_col(std::vector<std::string> v);

  std::size_t size() const {
    return kind == ColumnKind::numeric ? num.size() : cat.size();
  }
  bool missing(std::size_t i) const;
};

/// A raw label or reference value: either a number or a string.
using Cell = std::variant<double, std::string>;

/// Closed numeric interval used in reference group specifications.
struct ValueRange {
  double lo = 0.0;
  double hi = 0.0;
};

/// Scalar value or closed range, as allowed in reference groups.
using GroupValue = std::variant<double, std::string, ValueRange>;

struct ProtectedAttribute {
  std::string feature;
  std::vector<GroupValue> reference_group;
};

/// Declares which label values are favorable and which feature values
/// put a row into the privileged group. Mirrors the JSON sidecar format.
struct FairnessInfo {
  std::vector<Cell> favorable_labels;
  std::vector<ProtectedAttribute> protected_attributes;

  nlohmann::json to_json() const;
  static FairnessInfo from_json(const nlohmann::json& j);
};

/// Tabular dataset: named feature columns, one label column, row weights.
struct Dataset {
  std::vector<std::string> names;
  std::vector<Column> cols;
  Column labels;
  std::vector<double> weights;

  std::size_t n_rows() const { return labels.size(); }
  std::size_t n_cols() const { return cols.size(); }

  /// Index of a named column, or -1 when absent.
  int col_index(std::string_view name) const;

  /// Throws SchemaError when column lengths disagree, names collide or
  /// weights are negative.
  void check() const;

  Dataset subset(std::span<const std::size_t> rows) const;
  Dataset with_weights(std::vector<double> w) const;

  /// All-numeric feature matrix. Throws SchemaError when a categorical
  /// column remains or a numeric cell is missing.
  Matrix feature_matrix() const;

  /// Labels as 0/1 integers. Requires a numeric label column whose
  /// values are exactly 0 or 1 (the post-preprocessing encoding).
  std::vector<int> binary_labels() const;
};

/// Row-aligned boolean masks for group and label membership.
/// priv_mask[i] is true when row i lies in the reference group of every
/// protected attribute; fav_mask[i] is true when its label is favorable.
struct GroupEncoding {
  std::vector<std::uint8_t> priv_mask;
  std::vector<std::uint8_t> fav_mask;

  std::size_t n_rows() const { return priv_mask.size(); }
};

/// True when the cell at row i of the column matches any of the listed
/// values (scalar equality, or closed-range containment for numerics).
bool cell_matches(const Column& col, std::size_t i, const std::vector<GroupValue>& values);

/// True when the label at row i matches any favorable label.
bool label_matches(const Column& labels, std::size_t i, const std::vector<Cell>& favorable);

/// Resolve the fairness declaration against a dataset.
/// Throws SchemaError for unknown features and DegenerateGroupError when
/// either partition (privileged or unprivileged) is empty.
GroupEncoding bind_groups(const Dataset& d, const FairnessInfo& fi);

/// Disparate impact of the true labels: the weighted favorable rate of
/// the unprivileged partition divided by the privileged one. Undefined
/// when the privileged favorable rate is zero.
MetricValue baseline_di(const Dataset& d, const FairnessInfo& fi);

/// True if the cell value is the missing marker for its kind.
bool is_missing_numeric(double v);
bool is_missing_categorical(const std::string& v);

}  // namespace fairens
