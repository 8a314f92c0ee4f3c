#pragma once

#include <stdexcept>
#include <string>

namespace admissible {

/// Invalid configuration, malformed input file, or a violated precondition
/// on user-supplied data. Maps to CLI exit code 2.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

/// The accumulated constraint set admits no point (or the projection degenerated).
/// Maps to CLI exit code 3.
class InfeasibleError : public std::runtime_error {
 public:
  explicit InfeasibleError(const std::string& what) : std::runtime_error(what) {}
};

/// Non-finite intermediate values or an iterative method that failed to converge.
/// Maps to CLI exit code 4.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace admissible
