#pragma once
#include <filesystem>
#include <string>
#include <vector>

#include "fairens/dataset.hpp"

namespace fairens {

/// Parse CSV text with a header row into a dataset. The named label
/// column (default: the last column) becomes the labels. Column kinds
/// are inferred: a column is numeric when every present cell parses as
/// a number. Empty cells and "?" are missing.
Dataset parse_csv(const std::string& text, const std::string& label_column = "");

Dataset load_csv(const std::filesystem::path& file, const std::string& label_column = "");

/// Load the fairness sidecar JSON ({"favorable_labels": ..,
/// "protected_attributes": ..}).
FairnessInfo load_fairness_info(const std::filesystem::path& file);

/// Serialize a dataset back to CSV (labels as the last column).
std::string to_csv(const Dataset& d, const std::string& label_column = "label");

}  // namespace fairens
