#include "fairens/plan.hpp"

#include "fairens/errors.hpp"

namespace fairens {

using nlohmann::json;

std::string ensemble_kind_name(EnsembleKind k) {
  switch (k) {
    case EnsembleKind::none: return "none";
    case EnsembleKind::bagging: return "bagging";
    case EnsembleKind::boosting: return "boosting";
    case EnsembleKind::voting: return "voting";
    default: return "stacking";
  }
}

EnsembleKind ensemble_kind_from_name(const std::string& s) {
  if (s == "none") return EnsembleKind::none;
  if (s == "bagging") return EnsembleKind::bagging;
  if (s == "boosting") return EnsembleKind::boosting;
  if (s == "voting") return EnsembleKind::voting;
  if (s == "stacking") return EnsembleKind::stacking;
  throw ConfigError("unknown ensemble kind '" + s + "'");
}

std::string mitigator_kind_name(MitigatorKind k) {
  switch (k) {
    case MitigatorKind::none: return "none";
    case MitigatorKind::pre: return "pre";
    case MitigatorKind::in: return "in";
    default: return "post";
  }
}

MitigatorKind mitigator_kind_from_name(const std::string& s) {
  if (s == "none") return MitigatorKind::none;
  if (s == "pre") return MitigatorKind::pre;
  if (s == "in") return MitigatorKind::in;
  if (s == "post") return MitigatorKind::post;
  throw ConfigError("unknown mitigator kind '" + s + "'");
}

std::string mitigation_level_name(MitigationLevel l) {
  return l == MitigationLevel::estimator ? "estimator" : "ensemble";
}

MitigationLevel mitigation_level_from_name(const std::string& s) {
  if (s == "estimator") return MitigationLevel::estimator;
  if (s == "ensemble") return MitigationLevel::ensemble;
  throw ConfigError("unknown mitigation level '" + s + "'");
}

json MitigatorConfig::to_json() const {
  return {{"name", name}, {"hyperparameters", hyperparameters}};
}

MitigatorConfig MitigatorConfig::from_json(const json& j) {
  MitigatorConfig c;
  c.name = j.value("name", "");
  c.hyperparameters = j.value("hyperparameters", json::object());
  if (!c.hyperparameters.is_object())
    throw ConfigError("mitigator config: hyperparameters must be an object");
  return c;
}

json MitigationPlan::to_json() const {
  return {{"ensemble", ensemble_kind_name(ensemble)},
          {"mitigator", mitigator_kind_name(mitigator)},
          {"level", mitigation_level_name(level)},
          {"n", n},
          {"passthrough", passthrough},
          {"mitigate_base", mitigate_base},
          {"mitigate_final", mitigate_final},
          {"voting", voting_mode},
          {"config", config.to_json()}};
}

MitigationPlan MitigationPlan::from_json(const json& j) {
  MitigationPlan p;
  p.ensemble = ensemble_kind_from_name(j.value("ensemble", "none"));
  p.mitigator = mitigator_kind_from_name(j.value("mitigator", "none"));
  p.level = mitigation_level_from_name(j.value("level", "estimator"));
  p.n = j.value("n", 0);
  p.passthrough = j.value("passthrough", false);
  p.mitigate_base = j.value("mitigate_base", false);
  p.mitigate_final = j.value("mitigate_final", false);
  p.voting_mode = j.value("voting", "");
  if (j.contains("config")) p.config = MitigatorConfig::from_json(j.at("config"));
  return p;
}

std::string MitigationPlan::notation() const {
  auto mit_wrap = [&](const std::string& inner, const char* suffix) {
    switch (mitigator) {
      case MitigatorKind::pre: return "PreMit" + std::string(suffix) + "(" + inner + ")";
      case MitigatorKind::in: return "InMit" + std::string(suffix);
      case MitigatorKind::post: return "PostMit" + std::string(suffix) + "(" + inner + ")";
      default: return inner;
    }
  };

  if (ensemble == EnsembleKind::none) return "NoEnsemble(" + mit_wrap("est", "") + ")";

  if (ensemble == EnsembleKind::bagging || ensemble == EnsembleKind::boosting) {
    std::string name = ensemble == EnsembleKind::bagging ? "Bag" : "Boost";
    std::string size = "n=" + std::to_string(n);
    if (mitigator == MitigatorKind::none) return name + "(est, " + size + ")";
    if (level == MitigationLevel::ensemble)
      return mit_wrap(name + "(est, " + size + ")", "");
    return name + "(" + mit_wrap("est", "") + ", " + size + ")";
  }

  if (ensemble == EnsembleKind::voting) {
    std::string members =
        mitigator == MitigatorKind::none || level == MitigationLevel::ensemble
            ? "est_i"
            : mit_wrap("est_i", "_i");
    std::string vote = "Vote(" + members + (voting_mode == "hard" ? ", hard" : "") + ")";
    if (mitigator != MitigatorKind::none && level == MitigationLevel::ensemble)
      return mit_wrap(vote, "");
    return vote;
  }

  // stacking
  std::string members = mitigate_base ? mit_wrap("est_i", "_i") : "est_i";
  std::string final_est = "est_n";
  if (mitigate_final)
    final_est = mitigator == MitigatorKind::in ? "InMit_n" : mit_wrap("est_n", "");
  std::string stack = "Stack(" + members + ", " + final_est +
                      (passthrough ? ", passthrough" : "") + ")";
  if (mitigator != MitigatorKind::none && level == MitigationLevel::ensemble)
    return mit_wrap(stack, "");
  return stack;
}

std::optional<std::string> validate_plan(const MitigationPlan& p) {
  const bool sized =
      p.ensemble == EnsembleKind::bagging || p.ensemble == EnsembleKind::boosting;
  if (sized && p.n < 1)
    return "bagging and boosting plans need n >= 1";
  if (!sized && p.n != 0)
    return "only bagging and boosting plans take a member count";

  if (p.ensemble == EnsembleKind::voting) {
    if (p.voting_mode != "soft" && p.voting_mode != "hard")
      return "voting plans need voting mode 'soft' or 'hard'";
  } else if (!p.voting_mode.empty()) {
    return "voting mode is only valid for voting plans";
  }

  if (p.ensemble != EnsembleKind::stacking) {
    if (p.passthrough) return "passthrough is only valid for stacking plans";
    if (p.mitigate_base || p.mitigate_final)
      return "base/final mitigation targets are only valid for stacking plans";
  }

  if (p.mitigator == MitigatorKind::none) {
    if (!p.config.empty()) return "a mitigator config was given but the mitigator kind is none";
    if (p.level != MitigationLevel::estimator)
      return "ensemble-level placement requires a mitigator";
    if (p.mitigate_base || p.mitigate_final)
      return "mitigation targets were set but the mitigator kind is none";
    return std::nullopt;
  }

  if (p.ensemble == EnsembleKind::none && p.level == MitigationLevel::ensemble)
    return "there is no ensemble to mitigate at the ensemble level";

  if (p.mitigator == MitigatorKind::in && p.level == MitigationLevel::ensemble)
    return "an in-estimator mitigator is itself the estimator, so it cannot be "
           "applied at the ensemble level";

  if (p.mitigator == MitigatorKind::post && p.level == MitigationLevel::ensemble &&
      p.ensemble == EnsembleKind::voting && p.voting_mode == "hard")
    return "a post-estimator mitigator needs scores, but hard voting exposes labels only";

  if (p.ensemble == EnsembleKind::stacking) {
    if (p.level == MitigationLevel::ensemble) {
      if (p.mitigate_base || p.mitigate_final)
        return "ensemble-level stacking mitigation wraps the whole stack; base/final "
               "targets do not apply";
    } else {
      if (p.mitigate_base && p.mitigate_final)
        return "stacking base and final estimators could each be mitigated, but not both";
      if (!p.mitigate_base && !p.mitigate_final)
        return "stacking estimator-level mitigation must target the base members or "
               "the final estimator";
      if (p.mitigate_final && !p.passthrough)
        return "final-estimator mitigation requires passthrough: without the original "
               "features the final estimator has nothing the mitigator can act on";
    }
  }

  if (!p.config.empty()) {
    const std::string& name = p.config.name;
    bool ok = false;
    switch (p.mitigator) {
      case MitigatorKind::pre:
        ok = name == "reweighing" || name == "di_remover" || name == "lfr";
        break;
      case MitigatorKind::in: ok = name == "prejudice_remover"; break;
      case MitigatorKind::post: ok = name == "calibrated_eq_odds"; break;
      default: break;
    }
    if (!ok)
      return "mitigator '" + name + "' does not implement kind '" +
             mitigator_kind_name(p.mitigator) + "'";
  }

  return std::nullopt;
}

}  // namespace fairens
