#pragma once

#include <stdexcept>
#include <string>

namespace heatinv {

/// Bad caller input: out-of-domain arguments, malformed configuration.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed or degenerate data (bad CSV, all-zero flux, dimension mismatch).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An iterative method failed to produce a usable answer.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace heatinv
