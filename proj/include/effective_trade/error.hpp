#pragma once

#include <stdexcept>
#include <string>

namespace effective_trade {

/// Thrown when a caller breaks a precondition (dimension mismatch, bad
/// probabilities, negative flows, ...).
class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown while loading a scenario. Carries the offending location if known.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what, int line = 0,
                           int column = 0)
      : std::runtime_error(what), line_(line), column_(column) {}

  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  int line_;
  int column_;
};

/// A numerical routine failed to reach its tolerance.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what, double residual = 0.0)
      : std::runtime_error(what), residual_(residual) {}

  /// Worst residual seen when the routine gave up.
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

}  // namespace effective_trade
