#pragma once
#include <optional>
#include <string>

#include <json.hpp>

namespace fairens {

enum class EnsembleKind { none, bagging, boosting, voting, stacking };
enum class MitigatorKind { none, pre, in, post };
enum class MitigationLevel { estimator, ensemble };

std::string ensemble_kind_name(EnsembleKind k);
EnsembleKind ensemble_kind_from_name(const std::string& s);
std::string mitigator_kind_name(MitigatorKind k);
MitigatorKind mitigator_kind_from_name(const std::string& s);
std::string mitigation_level_name(MitigationLevel l);
MitigationLevel mitigation_level_from_name(const std::string& s);

/// Concrete mitigator choice: a registered name plus its hyperparameters.
/// Empty name means "use the grid default for the plan's mitigator kind".
struct MitigatorConfig {
  std::string name;
  nlohmann::json hyperparameters = nlohmann::json::object();

  bool empty() const { return name.empty(); }
  nlohmann::json to_json() const;
  static MitigatorConfig from_json(const nlohmann::json& j);
  bool operator==(const MitigatorConfig&) const = default;
};

/// One cell of the combination grid: which ensemble, which mitigator
/// kind, and where the mitigation attaches. For stacking, mitigation at
/// the estimator level further splits into base members vs the final
/// estimator; passthrough controls whether the final estimator also
/// sees the original features.
struct MitigationPlan {
  EnsembleKind ensemble = EnsembleKind::none;
  MitigatorKind mitigator = MitigatorKind::none;
  MitigationLevel level = MitigationLevel::estimator;
  int n = 0;                      // member count; bagging/boosting only
  bool passthrough = false;       // stacking only
  bool mitigate_base = false;     // stacking only
  bool mitigate_final = false;    // stacking only
  std::string voting_mode = "";   // voting only: "soft" | "hard"
  MitigatorConfig config;

  nlohmann::json to_json() const;
  static MitigationPlan from_json(const nlohmann::json& j);

  /// Canonical serialized form; equal plans have equal keys.
  std::string key() const { return to_json().dump(); }

  /// Pseudo-code display string, e.g. "Bag(PreMit(est), n=50)",
  /// "NoEnsemble(InMit)", "Stack(est_i, PostMit(est_n), passthrough)".
  std::string notation() const;

  bool operator==(const MitigationPlan&) const = default;
};

/// Structural feasibility check. Returns std::nullopt when the plan is
/// buildable, otherwise the reason it is rejected:
///  - in-estimator mitigation cannot wrap an ensemble (it is itself the
///    estimator);
///  - a post-estimator mitigator cannot consume a hard-voting upstream
///    (labels only, no scores);
///  - stacking cannot mitigate base members and the final estimator in
///    the same plan;
///  - stacking cannot mitigate the final estimator without passthrough
///    (the final estimator otherwise lacks the dataset features the
///    mitigators act on);
///  plus field-consistency rules (sizes, flags on the wrong ensemble,
///  mitigator names incompatible with the mitigator kind).
std::optional<std::string> validate_plan(const MitigationPlan& p);

}  // namespace fairens
