#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace slope {

/// Bad parameter or shape. Maps to CLI exit code 1.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An operation was called on inputs that cannot support it, e.g. physical
/// sensing with an operator that lacks the all-open row.
class PreconditionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Calibration with g == f cannot separate signal from leakage.
class DegenerateCalibration : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Non-finite values appeared in the iteration.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(std::size_t iteration, const std::string& what)
      : std::runtime_error(what), iteration_(iteration) {}
  std::size_t iteration() const noexcept { return iteration_; }

 private:
  std::size_t iteration_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed raster file. `offset` is the byte position where parsing failed.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t offset, const std::string& what)
      : std::runtime_error(what + " (at byte " + std::to_string(offset) + ")"),
        offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// Malformed measurement file.
class FormatError : public std::runtime_error {
 public:
  enum class Kind { BadMagic, UnsupportedVersion, SizeMismatch, Truncated, Inconsistent };

  FormatError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

}  // namespace slope
