#pragma once

#include <stdexcept>
#include <string>

namespace cdwork {

struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad user input: malformed config, unknown keys, out-of-range parameters.
struct ConfigError : Error {
  using Error::Error;
};

struct OutOfRangeError : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

// A numerical contract was violated mid-computation.
struct NumericalError : Error {
  using Error::Error;
};

struct NonHermitianError : NumericalError {
  using NumericalError::NumericalError;
};

struct DimensionError : NumericalError {
  using NumericalError::NumericalError;
};

struct DegenerateSpectrumError : NumericalError {
  using NumericalError::NumericalError;
};

struct NormViolationError : NumericalError {
  using NumericalError::NumericalError;
};

struct NonUnitaryStepError : NumericalError {
  using NumericalError::NumericalError;
};

struct NotConvergedError : NumericalError {
  using NumericalError::NumericalError;
};

struct InitialNotEigenstateError : NumericalError {
  using NumericalError::NumericalError;
};

struct PhaseConsistencyError : NumericalError {
  using NumericalError::NumericalError;
};

}  // namespace cdwork
