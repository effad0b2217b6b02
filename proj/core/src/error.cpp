#include "narmine/error.hpp"

#include <utility>

namespace nm {

namespace {

std::string format_line(const std::string& source, std::size_t line,
                        const std::string& message) {
  if (line == 0) return source + ": " + message;
  return source + ":" + std::to_string(line) + ": " + message;
}

}  // namespace

ParseError::ParseError(std::string source, std::size_t line,
                       const std::string& message)
    : ParseError(source, line, std::nullopt,
                 format_line(source, line, message)) {}

ParseError::ParseError(std::string source, std::size_t line,
                       std::optional<std::size_t> offset,
                       const std::string& formatted)
    : Error(formatted),
      source_(std::move(source)),
      line_(line),
      offset_(offset) {}

ParseError ParseError::at_offset(std::string source, std::size_t offset,
                                 const std::string& message) {
  std::string formatted =
      source + ": byte " + std::to_string(offset) + ": " + message;
  return ParseError(std::move(source), 0, offset, formatted);
}

}  // namespace nm
