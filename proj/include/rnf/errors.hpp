#pragma once

#include <stdexcept>
#include <string>

namespace rnf {

// Error categories map 1:1 onto CLI exit codes (see tools/rnf.cpp):
// ConfigError -> 2, NumericError -> 3, IoError -> 4.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace rnf
