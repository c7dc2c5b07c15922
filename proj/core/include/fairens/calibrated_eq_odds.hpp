#pragma once
#include <span>
#include <string>

#include <json.hpp>

#include "fairens/dataset.hpp"

namespace fairens {

/// Post-estimator score calibration. On a holdout set it measures each
/// group's generalized cost
///   fp_rate * gfpr * (1 - base_rate) + fn_rate * gfnr * base_rate
/// (soft rates from predicted favorable scores) and computes the mixing
/// probability that lifts the lower-cost group to the other group's cost
/// by replacing scores with that group's base rate. adjust() returns the
/// expected mixed score, so the output is deterministic; thresholding the
/// adjusted score at 0.5 gives labels.
class CalibratedEqOdds {
 public:
  enum class Constraint { fpr, fnr, weighted };

  CalibratedEqOdds(FairnessInfo fi, Constraint constraint);

  /// favorable_scores[i] = upstream P(favorable) for holdout row i.
  void fit(std::span<const double> favorable_scores, const Dataset& holdout);

  /// Expected scores after mixing, aligned with the rows of d.
  std::vector<double> adjust(std::span<const double> favorable_scores,
                             const Dataset& d) const;

  Constraint constraint() const { return constraint_; }
  double mix_rate_priv() const { return mix_priv_; }
  double mix_rate_unpriv() const { return mix_unpriv_; }
  double base_rate_priv() const { return base_priv_; }
  double base_rate_unpriv() const { return base_unpriv_; }

  nlohmann::json describe() const;

  static Constraint constraint_from_name(const std::string& name);
  static std::string constraint_name(Constraint c);

 private:
  FairnessInfo fi_;
  Constraint constraint_;
  double base_priv_ = 0.0, base_unpriv_ = 0.0;
  double mix_priv_ = 0.0, mix_unpriv_ = 0.0;
  bool fitted_ = false;
};

}  // namespace fairens
