#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dlab {

// Base class for everything this library throws on purpose.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct NonFiniteError : Error {
  using Error::Error;
};

struct NonSymmetricError : Error {
  using Error::Error;
};

struct DimensionMismatchError : Error {
  using Error::Error;
};

struct TagViolationError : Error {
  using Error::Error;
};

struct InvalidValueError : Error {
  using Error::Error;
};

struct SegmentOverflowError : Error {
  using Error::Error;
};

struct IndexOutOfRangeError : Error {
  using Error::Error;
};

struct MissingLowerBoundError : Error {
  using Error::Error;
};

struct StepUnderflowError : Error {
  using Error::Error;
};

struct OriginCrossingError : Error {
  using Error::Error;
};

struct NotSettledError : Error {
  using Error::Error;
};

struct SameClassError : Error {
  using Error::Error;
};

// Config file errors carry the offending line (1-based, 0 = whole file).
struct ParseError : Error {
  ParseError(std::size_t line_no, const std::string& msg)
      : Error("line " + std::to_string(line_no) + ": " + msg), line(line_no) {}
  std::size_t line;
};

struct UnknownKeyError : ParseError {
  using ParseError::ParseError;
};

}  // namespace dlab
