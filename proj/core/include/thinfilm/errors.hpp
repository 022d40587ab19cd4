#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace thinfilm {

// Malformed call: mismatched vector lengths, unsupported derivative order.
struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Evaluation point outside the interval.
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

// Invalid physical or numerical parameter (eps <= 0, R <= 0, ...).
struct ParameterError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// NaN or infinity detected in a named nodal field or coefficient vector.
class NumericError : public std::runtime_error {
public:
  NumericError(std::string field, std::size_t index)
      : std::runtime_error("non-finite value in field '" + field +
                           "' at index " + std::to_string(index)),
        field_(std::move(field)),
        index_(index) {}

  const std::string& field() const { return field_; }
  std::size_t index() const { return index_; }

private:
  std::string field_;
  std::size_t index_;
};

// Unreadable, incomplete, or inconsistent configuration input.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Initial profile is negative where sampled; carries the offending location.
class InitialDataError : public std::runtime_error {
public:
  InitialDataError(const std::string& which, double x, double value)
      : std::runtime_error("initial profile '" + which + "' is negative at x = " +
                           std::to_string(x) + " (value " + std::to_string(value) + ")"),
        x_(x),
        value_(value) {}

  double x() const { return x_; }
  double value() const { return value_; }

private:
  double x_;
  double value_;
};

// Checkpoint file cannot be parsed; carries the 1-based line number.
class CheckpointError : public std::runtime_error {
public:
  CheckpointError(std::string msg, std::size_t line)
      : std::runtime_error(msg + " (line " + std::to_string(line) + ")"), line_(line) {}

  std::size_t line() const { return line_; }

private:
  std::size_t line_;
};

}  // namespace thinfilm
