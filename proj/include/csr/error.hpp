#pragma once

#include <stdexcept>
#include <string>

namespace csr {

// Base for all library errors so callers can catch one type at the boundary.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Input validation failures.
struct SelfLoopError : Error {
  using Error::Error;
};
struct LabelOutOfRangeError : Error {
  using Error::Error;
};
struct DisconnectedError : Error {
  using Error::Error;
};
struct NotATreeError : Error {
  using Error::Error;
};
struct MissingResourceError : Error {
  using Error::Error;
};

// Runtime failures.
struct GenerationFailedError : Error {
  using Error::Error;
};
struct NumericalFailureError : Error {
  using Error::Error;
};
struct SizeLimitError : Error {
  using Error::Error;
};

}  // namespace csr
