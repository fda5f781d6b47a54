#pragma once

#include <stdexcept>
#include <string>

namespace chaoslab {

// Argument-level failures (bad sizes, times, masks). Callers can catch
// std::invalid_argument to treat them uniformly.
class invalid_parameter : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class shape_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Request exceeds what exact enumeration can hold in memory.
class resource_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class numeric_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class unsupported_error : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace chaoslab
