#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ausyn {

// Base class for everything thrown by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Violated precondition: bad rates, shapes, ranges, unmet config constraints.
class InvalidArgumentError : public Error {
 public:
  using Error::Error;
};

// Input is structurally fine but numerically unusable, e.g. rank-deficient
// covariance, zero-variance series, chance agreement of 1.
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

// Filesystem-level failure (open, rename, write).
class IoError : public Error {
 public:
  using Error::Error;
};

// Malformed file content. line() is 1-based and counts the header line as
// line 1, so the first data row is line 2.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t line)
      : Error(message + " (line " + std::to_string(line) + ")"), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace ausyn
