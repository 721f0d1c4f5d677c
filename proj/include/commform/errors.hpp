#pragma once

#include <stdexcept>
#include <string>

namespace commform {

/// Invalid model or campaign configuration (bad ranges, inconsistent params).
class ConfigError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// Agent id outside [0, n).
class IdError : public std::out_of_range {
  public:
    using std::out_of_range::out_of_range;
};

/// A violated internal precondition; always indicates a bug in the caller.
class ContractError : public std::logic_error {
  public:
    using std::logic_error::logic_error;
};

/// Input data that parses but is semantically unusable.
class DataError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A file could not be opened, read or written.
class IoError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Malformed file content. `line` is 1-based, 0 when not applicable.
class ParseError : public std::runtime_error {
  public:
    ParseError(const std::string& what, std::size_t line = 0)
        : std::runtime_error(line ? what + " (line " + std::to_string(line) + ")" : what),
          line_(line) {}
    std::size_t line() const noexcept { return line_; }

  private:
    std::size_t line_;
};

} // namespace commform
