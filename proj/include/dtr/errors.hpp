#pragma once

#include <stdexcept>
#include <string>

namespace dtr {

/// Malformed or inconsistent input data (bad indices, ragged CSV rows, ...).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Hyperparameters outside their admissible range.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A computation produced a non-finite value.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Broken internal precondition, e.g. a stale tier partition.
class ConsistencyError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace dtr
