#pragma once

#include <stdexcept>
#include <string>

namespace qfd {

/// Base of every error raised by the library. The CLI maps these to exit code 1
/// (user error), except ConvergenceError which is reported as an internal failure.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A requested size exceeds a configured hard limit.
class CapacityError : public Error {
  public:
    using Error::Error;
};

/// A qubit, row or slot index is out of range.
class IndexError : public Error {
  public:
    using Error::Error;
};

/// Operand shapes do not agree.
class DimensionError : public Error {
  public:
    using Error::Error;
};

/// An argument is outside its admissible domain (non-finite, non-positive, ...).
class ValueError : public Error {
  public:
    using Error::Error;
};

/// Input file does not match the expected schema or cannot be parsed.
class SchemaError : public Error {
  public:
    using Error::Error;
};

class ConvergenceError : public Error {
  public:
    using Error::Error;
};

}  // namespace qfd
