#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace drivetherm {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

/// Raised when an operation needs J^{-1} on a state whose smallest
/// eigenvalue is at or below the rank floor.
class FullRankViolation : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  using Error::Error;
};

class ExtrapolationError : public Error {
 public:
  using Error::Error;
};

/// Unitarity or norm drift exceeded the configured budget.
class StepSizeTooCoarse : public Error {
 public:
  StepSizeTooCoarse(const std::string& what, std::size_t suggested_steps)
      : Error(what), suggested_steps_(suggested_steps) {}
  std::size_t suggested_steps() const noexcept { return suggested_steps_; }

 private:
  std::size_t suggested_steps_;
};

class DetuningTooSmall : public Error {
 public:
  using Error::Error;
};

/// Invalid run configuration. `line` is 1-based, 0 when unknown.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what, int line = 0)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

}  // namespace drivetherm
