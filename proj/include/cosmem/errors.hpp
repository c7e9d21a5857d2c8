#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cosmem {

// Located input error. `line` is 1-based within the offending file.
class ParseError : public std::runtime_error {
public:
  enum class Kind {
    malformed_row,
    non_monotonic_timestamp,
    duplicate_dimm,
    inconsistent_containment,
  };

  ParseError(Kind kind, std::size_t line, std::string reason)
      : std::runtime_error("line " + std::to_string(line) + ": " + reason),
        kind_(kind),
        line_(line),
        reason_(std::move(reason)) {}

  Kind kind() const { return kind_; }
  std::size_t line() const { return line_; }
  const std::string& reason() const { return reason_; }

private:
  Kind kind_;
  std::size_t line_;
  std::string reason_;
};

class LengthMismatch : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

class EmptySample : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

} // namespace cosmem
