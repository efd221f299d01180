#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ocrqa {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input bytes are not valid UTF-8, or a file could not be read.
class InputError : public Error {
 public:
  using Error::Error;
};

/// A structured file (GT, model, manifest, CSV) violates its format.
/// `line` is 1-based; 0 means the location is unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t line = 0)
      : Error(line == 0 ? message : "line " + std::to_string(line) + ": " + message),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Data parsed fine but is inconsistent with a model (unknown stub, two leaves in one category...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// An accuracy was requested over an empty reference (n = 0).
class UndefinedScoreError : public Error {
 public:
  using Error::Error;
};

/// A caller broke an operation's precondition.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Bad option values (unknown report format, threshold out of range...).
class UsageError : public Error {
 public:
  using Error::Error;
};

}  // namespace ocrqa
