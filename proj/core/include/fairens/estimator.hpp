#pragma once
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "fairens/errors.hpp"
#include "fairens/matrix.hpp"

namespace fairens {

struct Capabilities {
  bool supports_weights = true;
  bool supports_proba = true;
};

/// Binary classifier contract over dense numeric features.
/// Labels are 0/1 with 1 the favorable class; predict breaks probability
/// ties toward 1. Fitting on a single-class y yields a constant predictor
/// and records a note retrievable via fit_notes().
class Estimator {
 public:
  virtual ~Estimator() = default;

  virtual std::string name() const = 0;
  virtual Capabilities capabilities() const { return {}; }

  virtual void fit(const Matrix& X, const std::vector<int>& y,
                   std::span<const double> weights) = 0;
  virtual Matrix predict_proba(const Matrix& X) const = 0;

  std::vector<int> predict(const Matrix& X) const;

  virtual std::unique_ptr<Estimator> clone_untrained() const = 0;
  virtual nlohmann::json to_json() const = 0;

  bool trained() const { return trained_; }
  const std::vector<std::string>& fit_notes() const { return fit_notes_; }

 protected:
  void check_fit_inputs(const Matrix& X, const std::vector<int>& y,
                        std::span<const double> weights) const;
  void require_trained() const {
    if (!trained_) throw NotTrainedError(name() + ": predict before fit");
  }
  /// Returns true when y has a single class; sets up the note.
  bool detect_single_class(const std::vector<int>& y);

  bool trained_ = false;
  int single_class_ = -1;  // -1 when both classes present
  std::vector<std::string> fit_notes_;
};

/// Rebuild a trained learner from its JSON document.
std::unique_ptr<Estimator> estimator_from_json(const nlohmann::json& j);

std::vector<double> uniform_weights(std::size_t n);

}  // namespace fairens
