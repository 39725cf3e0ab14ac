#pragma once

#include <stdexcept>
#include <string>

namespace confrank {

// Error taxonomy mirrors the CLI exit-code contract:
//   usage error -> 1, data error -> 2, numerical error -> 3.

class UsageError : public std::runtime_error {
 public:
  explicit UsageError(const std::string& msg) : std::runtime_error(msg) {}
};

class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace confrank
