#pragma once

#include <stdexcept>
#include <string>

namespace stresslens {

/// Raised when input data (corpus files, models, lexicons, manifests) is
/// missing, malformed, or violates a schema invariant.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Parameter precondition violations are reported as std::invalid_argument.

}  // namespace stresslens
