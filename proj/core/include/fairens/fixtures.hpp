#pragma once
#include <optional>
#include <string>
#include <vector>

#include "fairens/dataset.hpp"
#include "fairens/plan.hpp"

namespace fairens {

/// One known dataset: where to get it, how to read its fairness
/// declaration, and the reference facts (row count and baseline
/// disparate impact after preprocessing) it is expected to show.
struct CatalogEntry {
  std::string id;
  std::string description;
  long openml_id = 0;  // 0: no OpenML source, supply a local CSV
  std::string target;
  FairnessInfo fairness;
  std::vector<std::string> drop;
  bool prefer_precision = false;
  std::size_t reference_rows = 0;
  double reference_di = 0.0;
};

const std::vector<CatalogEntry>& dataset_catalog();
const CatalogEntry* catalog_find(const std::string& id);

/// Reference step-1 winners per dataset, shipped as data, not as a test:
/// the pre-estimator table maps onto this library's mitigators directly;
/// in-estimator rows whose mitigator this library does not implement are
/// carried verbatim with supported=false and a stand-in configuration.
nlohmann::json reference_selected_configs();

}  // namespace fairens
