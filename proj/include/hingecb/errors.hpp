#pragma once

#include <stdexcept>
#include <string>

namespace hingecb {

// Error taxonomy used by the CLI to pick exit codes:
//   ConfigError -> 2, OracleBudgetError -> 3, IoError -> 4.
// Plain std::invalid_argument / std::domain_error from validation map to 2 as well.

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct OracleBudgetError : std::runtime_error {
  explicit OracleBudgetError(const std::string& what) : std::runtime_error(what) {}
};

struct IoError : std::runtime_error {
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace hingecb
