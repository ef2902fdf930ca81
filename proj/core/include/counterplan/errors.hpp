#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace counterplan {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A symbol (predicate, object, type) does not resolve against the vocabulary
// in use, or an arity does not match its schema.
class VocabularyError : public Error {
 public:
  using Error::Error;
};

// Quantifier expansion failed (unknown type-tag, unbound variable).
class GroundingError : public Error {
 public:
  using Error::Error;
};

// Malformed construction of a domain value (conflicting effects, empty
// effects on an operator that is not flagged as a no-op, ...).
class InvalidValue : public Error {
 public:
  using Error::Error;
};

// Text input did not conform to one of the accepted grammars. Line and column
// are 1-based; zero means "not applicable" (e.g. JSON structure errors).
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t line = 0, std::size_t column = 0)
      : Error(format(message, line, column)), message_(message), line_(line), column_(column) {}

  const std::string& detail() const noexcept { return message_; }
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  static std::string format(const std::string& message, std::size_t line, std::size_t column) {
    if (line == 0) return message;
    return std::to_string(line) + ":" + std::to_string(column) + ": " + message;
  }

  std::string message_;
  std::size_t line_;
  std::size_t column_;
};

}  // namespace counterplan
