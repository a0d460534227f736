#pragma once

#include <stdexcept>
#include <string>

namespace biphoton {

// Parameters that cannot describe a physical setup (bad grid, zero delay, ...).
class ConfigurationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A documented precondition of an operation does not hold.
class PreconditionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Input carries no usable weight (zero-norm slice, all-zero density, empty window).
class DegenerateInputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace biphoton
