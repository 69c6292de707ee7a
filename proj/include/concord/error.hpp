#pragma once

#include <stdexcept>
#include <string>

namespace concord {

/// Base error for all toolkit failures.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a pipeline configuration fails validation. The CLI maps this
/// to exit code 1; every other Error maps to exit code 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace concord
