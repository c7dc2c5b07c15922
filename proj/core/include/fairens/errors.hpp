#pragma once
#include <stdexcept>
#include <string>

namespace fairens {

/// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Column or feature resolution problems, shape mismatches.
struct SchemaError : Error { using Error::Error; };
/// A group partition or group-class cell is empty where a nonempty one is required.
struct DegenerateGroupError : Error { using Error::Error; };
/// Run configuration problems (bad JSON, schema violations, unknown names).
struct ConfigError : Error { using Error::Error; };
/// Malformed file payloads (CSV, ARFF, JSON sidecars).
struct ParseError : Error { using Error::Error; };
/// Network or cache failures while fetching remote datasets.
struct FetchError : Error { using Error::Error; };
/// Plan validation or pipeline assembly failures.
struct BuildError : Error { using Error::Error; };
/// Using predict/transform before fit.
struct NotTrainedError : Error { using Error::Error; };
/// Optimizer blew up (non-finite objective or gradient).
struct OptimizationError : Error { using Error::Error; };

}  // namespace fairens
