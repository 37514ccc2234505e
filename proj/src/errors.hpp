#pragma once

#include <stdexcept>
#include <string>

namespace psfs {

// Precondition violations (bad dimensions, out-of-range parameters, ...).
class InvalidArgument : public std::invalid_argument {
 public:
  explicit InvalidArgument(const std::string& what) : std::invalid_argument(what) {}
};

// File format / filesystem failures.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

// Numeric failure inside an iterative scheme (non-finite values).
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, int level, long long iteration)
      : std::runtime_error(what), level(level), iteration(iteration) {}

  int level = -1;
  long long iteration = -1;
};

}  // namespace psfs
