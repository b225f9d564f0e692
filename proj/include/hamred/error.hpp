#pragma once

#include <stdexcept>
#include <string>

namespace hamred {

// Base of every exception thrown by the library. The CLI maps subclasses to
// exit codes: validation-type errors to 2, numerical failures to 3.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidDimension : public Error {
 public:
  using Error::Error;
};

// A matrix that must be symplectic / orthonormal / vertical is not.
class StructureViolation : public Error {
 public:
  using Error::Error;
};

// Candidate vector adds nothing outside the current symplectic span.
class DegenerateCandidate : public Error {
 public:
  using Error::Error;
};

class DecompositionFailure : public Error {
 public:
  DecompositionFailure(const std::string& what, double residual)
      : Error(what + " (residual " + std::to_string(residual) + ")"), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

class StepFailure : public Error {
 public:
  StepFailure(const std::string& what, double residual)
      : Error(what + " (last residual " + std::to_string(residual) + ")"), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

class RankDegeneracy : public Error {
 public:
  using Error::Error;
};

class InsufficientRank : public Error {
 public:
  using Error::Error;
};

class NonFiniteState : public Error {
 public:
  using Error::Error;
};

class UnsupportedModel : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace hamred
