#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dofoc {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation (Gamma pole, bad order).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A special-function evaluation could not reach the requested accuracy.
class AccuracyError : public Error {
 public:
  AccuracyError(const std::string& what, double estimate)
      : Error(what), estimate_(estimate) {}
  double estimate() const noexcept { return estimate_; }

 private:
  double estimate_;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Order distribution whose mass is numerically zero.
class DegenerateDistributionError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Time grids of two sampled functions disagree.
class GridMismatchError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Implicit step iteration failed to converge.
class SolverDivergenceError : public Error {
 public:
  SolverDivergenceError(const std::string& what, std::size_t step)
      : Error(what), step_(step) {}
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

/// A user-supplied map returned NaN or Inf.
class DynamicsEvaluationError : public Error {
 public:
  using Error::Error;
};

/// A needle window contains no grid node; a finer grid is needed.
class ResolutionError : public Error {
 public:
  using Error::Error;
};

}  // namespace dofoc
