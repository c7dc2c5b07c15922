#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include "fairens/dataset.hpp"

namespace fairens {

struct FoldSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

struct KFoldResult {
  std::vector<FoldSplit> folds;
  std::vector<std::string> warnings;
};

/// Stratified k-fold split. Strata are the Cartesian product of the
/// binary label with each protected attribute's binary reference-group
/// membership. Within a stratum, rows are shuffled with the seed and
/// dealt round-robin, so per-stratum fold sizes differ by at most one.
/// Strata smaller than k are still dealt round-robin but are reported
/// in `warnings`.
KFoldResult stratified_kfold(const Dataset& d, const FairnessInfo& fi, std::size_t k,
                             std::uint64_t seed);

/// One seeded stratified split: `test` holds about `fraction` of each
/// stratum (at least 1 row and at most size-1 when the stratum has two
/// or more rows; singleton strata stay in `train`).
FoldSplit stratified_holdout(const Dataset& d, const FairnessInfo& fi, double fraction,
                             std::uint64_t seed);

}  // namespace fairens
