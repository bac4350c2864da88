#pragma once

#include <stdexcept>
#include <string>

namespace remlab {

// Bad input: violated precondition, malformed config, out-of-range parameter.
class UsageError : public std::invalid_argument {
 public:
  explicit UsageError(const std::string& what) : std::invalid_argument(what) {}
};

// A computation that was well posed but could not be carried out
// (factorization failure, degenerate covariance, empty cloud).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace remlab
