#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mlc {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidInput : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

// Ranking quantities are undefined when a sample has no relevant or no
// irrelevant label.
class DegenerateError : public Error {
 public:
  using Error::Error;
};

// Raised by the text loaders; `line()` is 1-based.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class RangeError : public ParseError {
 public:
  using ParseError::ParseError;
};

}  // namespace mlc
