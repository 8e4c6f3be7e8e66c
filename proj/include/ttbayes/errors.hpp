#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ttbayes {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the mathematical domain of the operation.
class DomainError : public Error {
public:
  using Error::Error;
};

/// A prior hyperparameter is outside its legal interval.
class HyperparameterError : public DomainError {
public:
  using DomainError::DomainError;
};

/// Observed data cannot support the requested computation.
class DataError : public Error {
public:
  using Error::Error;
};

/// Fewer than three observations in total (no residual degree of freedom).
class InsufficientDataError : public DataError {
public:
  using DataError::DataError;
};

/// Pooled variance is zero, so the t-statistic is undefined.
class DegenerateDataError : public DataError {
public:
  using DataError::DataError;
};

/// Malformed input file; carries the 1-based line number (0 when the problem
/// is not tied to a particular line).
class ParseError : public DataError {
public:
  ParseError(const std::string& what, std::size_t line)
      : DataError(what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

/// An iterative numerical method stopped before reaching its tolerance.
class ConvergenceError : public Error {
public:
  ConvergenceError(const std::string& what, double estimate, double error_bound)
      : Error(what), estimate_(estimate), error_bound_(error_bound) {}

  double estimate() const noexcept { return estimate_; }
  double error_bound() const noexcept { return error_bound_; }

private:
  double estimate_;
  double error_bound_;
};

} // namespace ttbayes
