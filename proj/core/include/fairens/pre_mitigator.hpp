#pragma once
#include <cstdint>
#include <memory>
#include <string>

#include <json.hpp>

#include "fairens/dataset.hpp"

namespace fairens {

/// Pre-estimator mitigation contract: fit learns group-conditional maps
/// from a training view, transform rewrites features or weights of any
/// view with the same schema. Labels are never altered (Reweighing reads
/// them to build its weight table, the feature repairs ignore them).
class PreMitigator {
 public:
  virtual ~PreMitigator() = default;

  virtual std::string name() const = 0;
  virtual void fit(const Dataset& d, std::uint64_t seed) = 0;
  virtual Dataset transform(const Dataset& d) const = 0;
  virtual nlohmann::json describe() const = 0;
  virtual std::unique_ptr<PreMitigator> clone_unfitted() const = 0;
};

/// No-op mitigator: transform returns its input untouched. Used to check
/// that mitigation plumbing alone does not disturb a pipeline.
class IdentityMitigator : public PreMitigator {
 public:
  std::string name() const override { return "identity"; }
  void fit(const Dataset&, std::uint64_t) override { fitted_ = true; }
  Dataset transform(const Dataset& d) const override {
    if (!fitted_) throw NotTrainedError("identity mitigator: transform before fit");
    return d;
  }
  nlohmann::json describe() const override {
    return {{"kind", "pre_mitigator"}, {"name", "identity"}};
  }
  std::unique_ptr<PreMitigator> clone_unfitted() const override {
    return std::make_unique<IdentityMitigator>();
  }

 private:
  bool fitted_ = false;
};

}  // namespace fairens
