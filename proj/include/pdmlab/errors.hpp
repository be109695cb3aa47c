#pragma once

#include <stdexcept>
#include <string>

namespace pdmlab {

/// Invalid user input: bad parameters, unknown catalog tags, malformed config.
/// The CLI maps it to exit code 2.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A physical precondition failed at run time, e.g. a non-positive mass on a
/// grid node or along a classical trajectory. Exit code 4.
class PhysicsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Eigensolver or linear-solve failure. Exit code 3.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace pdmlab
