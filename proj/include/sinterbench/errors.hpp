#pragma once

#include <stdexcept>
#include <string>

namespace sinterbench {

/// Malformed or inconsistent configuration. Maps to CLI exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numeric failure: non-finite results or a function evaluated outside its
/// domain. Maps to CLI exit code 3.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A configured memory or expansion budget would be exceeded. A kind of
/// configuration error with its own exit code, 4.
class ResourceError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

}  // namespace sinterbench
