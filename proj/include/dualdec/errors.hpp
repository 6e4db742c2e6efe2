#pragma once

#include <stdexcept>
#include <string>

namespace dualdec {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Dimensions or sizes that make the requested object meaningless.
class InvalidDimensionsError : public Error {
 public:
  using Error::Error;
};

/// Cost matrices that fail the symmetry / positive-definiteness contract.
class DegenerateProblemError : public Error {
 public:
  using Error::Error;
};

/// Net membership data that does not describe a valid multi-net topology.
class InvalidTopologyError : public Error {
 public:
  using Error::Error;
};

/// Requested a constant that does not exist for this problem class
/// (e.g. dual strong convexity under box constraints).
class ConstantUnavailableError : public Error {
 public:
  using Error::Error;
};

/// Local subproblem outside the closed-form solvable class.
class UnsupportedSubproblemError : public Error {
 public:
  using Error::Error;
};

/// Input outside the domain a distortion model is defined on.
class OutOfDomainError : public Error {
 public:
  using Error::Error;
};

/// Distortion model parameters that violate the model contract.
class InvalidDistortionModelError : public Error {
 public:
  using Error::Error;
};

/// Step-size rule violating its admissibility bound.
class InvalidStepRuleError : public Error {
 public:
  using Error::Error;
};

/// Iterative reference computation that did not reach its tolerance.
class NoConvergenceError : public Error {
 public:
  NoConvergenceError(const std::string& what, double last_gradient_norm)
      : Error(what), last_gradient_norm(last_gradient_norm) {}
  double last_gradient_norm;
};

/// Mixing series or solutions that belong to different problems.
class IncompatibleInputsError : public Error {
 public:
  using Error::Error;
};

/// Malformed run configuration; message names the offending field.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace dualdec
