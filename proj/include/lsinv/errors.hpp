#pragma once

#include <stdexcept>
#include <string>

namespace lsinv {

/// Invalid or inconsistent configuration / input files. CLI exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Solver breakdown, non-finite values, degenerate statistics. CLI exit code 3.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace lsinv
