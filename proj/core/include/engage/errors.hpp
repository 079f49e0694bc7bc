#pragma once

#include <stdexcept>
#include <string>

namespace engage {

// Bad user input: malformed files, out-of-range parameters, unknown ids.
// The CLI maps this to exit code 1.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A broken internal invariant (solver iteration cap, infeasible fairness LP).
// The CLI maps this to exit code 2.
class InternalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace engage
