#pragma once

#include <stdexcept>
#include <string>

namespace maqa {

// Bad command line; maps to exit code 1.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed or semantically invalid input; maps to exit code 2.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Resource or convergence limits hit; maps to exit code 3.
struct ResourceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace maqa
