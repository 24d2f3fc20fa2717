#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace teleop {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller broke a documented precondition (dimensions, lengths, ranges).
class ContractViolation : public Error {
 public:
  using Error::Error;
};

/// A structural precondition the algorithm relies on does not hold,
/// e.g. a non-diagonal R handed to the sequential update.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Innovation covariance could not be factorized.
class SingularInnovation : public Error {
 public:
  SingularInnovation(const std::string& what, double condition)
      : Error(what), condition_(condition) {}
  double condition() const { return condition_; }

 private:
  double condition_;
};

/// Regressor matrix is rank deficient.
class IllConditionedData : public Error {
 public:
  IllConditionedData(const std::string& what, double condition)
      : Error(what), condition_(condition) {}
  double condition() const { return condition_; }

 private:
  double condition_;
};

/// Model structure the consumer cannot represent (e.g. a static ARX map
/// handed to the filter).
class UnsupportedStructure : public Error {
 public:
  using Error::Error;
};

/// Malformed text input with a 1-based row (and optionally column).
class FormatError : public Error {
 public:
  FormatError(const std::string& what, std::size_t row, std::size_t column = 0)
      : Error(what), row_(row), column_(column) {}
  std::size_t row() const { return row_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t row_;
  std::size_t column_;
};

class ParseError : public FormatError {
 public:
  using FormatError::FormatError;
};

/// Unknown channel or key.
class LookupError : public Error {
 public:
  using Error::Error;
};

/// Any library error raised inside a scenario loop, tagged with its step.
class StepError : public Error {
 public:
  StepError(const std::string& what, std::size_t step)
      : Error(what), step_(step) {}
  std::size_t step() const { return step_; }

 private:
  std::size_t step_;
};

}  // namespace teleop
