#pragma once

#include <stdexcept>
#include <string>

namespace usm {

/// A precondition on user-supplied parameters was violated.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A file could not be read, parsed or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The eigensolver failed or the requested mode family was not found.
class ModeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The transient produced a non-finite state.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, double last_valid_time)
      : std::runtime_error(what), last_valid_time_(last_valid_time) {}
  double last_valid_time() const { return last_valid_time_; }

 private:
  double last_valid_time_;
};

}  // namespace usm
