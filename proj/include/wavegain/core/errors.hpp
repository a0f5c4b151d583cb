#pragma once

#include <stdexcept>
#include <string>

namespace wavegain {

/// Shape or extent mismatch between operands.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Invalid configuration: unknown filter set, bad init scheme, bad CLI values.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// File missing, truncated or malformed.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// NaN/Inf produced, or a numerically degenerate estimate.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A verification property (PR, adjoint, gradient) did not hold.
class VerificationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace wavegain
