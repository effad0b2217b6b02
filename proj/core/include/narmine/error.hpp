#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace nm {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text. Carries the source name and, when known, a 1-based
/// line number or a 0-based byte offset.
class ParseError : public Error {
 public:
  ParseError(std::string source, std::size_t line, const std::string& message);
  static ParseError at_offset(std::string source, std::size_t offset,
                              const std::string& message);

  const std::string& source() const noexcept { return source_; }
  std::size_t line() const noexcept { return line_; }
  std::optional<std::size_t> offset() const noexcept { return offset_; }

 private:
  ParseError(std::string source, std::size_t line,
             std::optional<std::size_t> offset, const std::string& formatted);

  std::string source_;
  std::size_t line_ = 0;
  std::optional<std::size_t> offset_;
};

/// Out-of-range parameters or inconsistent arguments.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A structural invariant of a domain value was violated.
class InvariantError : public Error {
 public:
  using Error::Error;
};

}  // namespace nm
