#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace wlks {

/// Malformed input text. Carries the 1-based line number when known.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// A node id or index outside its declared range.
class RangeError : public std::out_of_range {
 public:
  RangeError(const std::string& what, std::size_t line = 0)
      : std::out_of_range(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Invalid configuration or infeasible generator/experiment parameters.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A violated precondition between components (shape or namespace mismatch, non-symmetric input).
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Dataset-level problem discovered while running (e.g. an empty split).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace wlks
