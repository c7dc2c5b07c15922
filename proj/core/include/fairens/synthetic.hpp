#pragma once
#include <cstdint>

#include "fairens/dataset.hpp"

namespace fairens {

struct SyntheticSpec {
  std::size_t rows = 600;
  std::size_t features = 4;
  double target_di = 0.6;          // planted disparate impact of the true labels
  double privileged_fraction = 0.5;
  double favorable_rate_privileged = 0.5;
  std::uint64_t seed = 0;
};

struct SyntheticDataset {
  Dataset data;
  FairnessInfo fairness_info;
};

/// Generates a dataset with a planted group bias: standard-normal numeric
/// features, a binary protected column "grp" (1 = privileged) and labels
/// drawn from a logistic model whose per-group intercepts are calibrated
/// so the favorable rates approximate target_di. Feature weights make the
/// labels learnable. Deterministic in the seed.
SyntheticDataset make_planted_bias(const SyntheticSpec& spec);

}  // namespace fairens
