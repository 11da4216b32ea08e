#pragma once

#include <stdexcept>
#include <string>

namespace contextua {

/// Malformed or inconsistent input: bad dimensions, unknown ids, points
/// outside the domain an operation is defined on.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical procedure gave up (iteration guard, no feasible start).
class SolverFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace contextua
