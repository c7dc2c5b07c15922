#pragma once
#include <string>

#include "fairens/dataset.hpp"

namespace fairens {

/// Parse ARFF text. Supports numeric/real/integer and nominal attributes,
/// '%' comments, quoted values and '?' missing cells. Sparse data rows
/// ({index value, ...}) and string/date attributes are rejected.
/// The label column is `target` when given, otherwise the attribute named
/// "class" (case-insensitive), otherwise the last attribute.
Dataset parse_arff(const std::string& text, const std::string& target = "");

}  // namespace fairens
