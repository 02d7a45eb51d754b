#pragma once

#include <limits>
#include <stdexcept>
#include <string>

namespace l2field {

/// Invalid argument or precondition violation (bad parameter range, size or
/// space mismatch, malformed configuration).
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Request exceeds a configured resource budget.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// File could not be read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numerical failure. Carries the smallest eigenvalue of the offending matrix
/// when one is known (NaN otherwise).
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what,
                        double min_eig = std::numeric_limits<double>::quiet_NaN())
      : std::runtime_error(what), min_eig_(min_eig) {}

  double min_eig() const noexcept { return min_eig_; }

 private:
  double min_eig_;
};

}  // namespace l2field
