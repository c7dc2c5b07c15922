#pragma once
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fairens/dataset.hpp"

namespace fairens {

/// Per-column statistics learned at train time and replayed at test time.
struct ColumnStats {
  double mean = 0.0;
  double stddev = 1.0;   // divisor; 1.0 for constant columns
  bool constant = false;
};

/// Train-time state needed to replay preprocessing on unseen rows:
/// zero-mean unit-variance maps for numeric columns (population std; the
/// mean doubles as the imputation value for missing cells) and the
/// category vocabulary of each categorical column for one-hot encoding.
struct Standardizer {
  std::map<std::string, ColumnStats> numeric;
  std::map<std::string, std::vector<std::string>> categories;

  /// Standardize a single value of a known column.
  double apply(const std::string& column, double x) const;

  nlohmann::json to_json() const;
  static Standardizer from_json(const nlohmann::json& j);
};

struct PreprocessReport {
  std::size_t dropped_rows = 0;
  std::vector<std::string> constant_columns;
  std::vector<std::string> warnings;
};

struct PreprocessResult {
  Dataset data;
  FairnessInfo fairness_info;  // rebased: favorable [1], reference groups [1]
  Standardizer standardizer;
  PreprocessReport report;
};

/// Applies the dataset preparation recipe:
///  - drops the listed columns (must not include protected attributes),
///  - drops rows with a missing label or missing protected attribute,
///  - binarizes each protected attribute to one numeric 0/1 column
///    (1 = privileged) and the labels to 0/1 (1 = favorable),
///  - standardizes numeric columns to zero mean and unit variance
///    (population std, constant columns are zero-centered and flagged),
///    imputing missing numeric cells with the training mean,
///  - one-hot encodes remaining categorical columns using the training
///    vocabulary (unseen categories become all-zero rows).
/// When `fitted` is given its maps are replayed instead of refit.
PreprocessResult preprocess(const Dataset& d, const FairnessInfo& fi,
                            const std::vector<std::string>& drop,
                            const std::optional<Standardizer>& fitted = std::nullopt);

}  // namespace fairens
