#pragma once

#include <stdexcept>
#include <string>

namespace fairpoison {

/// Malformed or semantically invalid config text (schemas, experiment files).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Bad input data: CSV defects, empty splits, missing groups, infeasible
/// attack preconditions.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace fairpoison
