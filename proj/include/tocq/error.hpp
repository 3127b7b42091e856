#pragma once

#include <stdexcept>
#include <string>

namespace tocq {

/// Malformed or incomplete user configuration (CLI exit status 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A physical invariant was violated during a computation (CLI exit status 3).
class PhysicsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace tocq
