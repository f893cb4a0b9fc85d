#pragma once

#include <stdexcept>
#include <string>

namespace lacsim {

/// Input violates a documented invariant (bad spin, non-unit axis, tau <= 0, ...).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Failure inside a numerical kernel (eigensolver, non-real trace, ...).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// File could not be opened, read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace lacsim
