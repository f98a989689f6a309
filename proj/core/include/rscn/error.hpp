#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rscn {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller broke a documented precondition (shape mismatch, out-of-range parameter).
class ContractViolation : public Error {
 public:
  using Error::Error;
};

/// A decomposition failed to converge or produced non-finite values.
class NumericalFailure : public Error {
 public:
  using Error::Error;
};

/// Evaluation was requested on a model without hidden nodes.
class EmptyModel : public Error {
 public:
  EmptyModel() : Error("model has no hidden nodes") {}
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Malformed CSV input. Row and column are 1-based and count data rows only
/// (the header line, when present, is not counted).
class ParseError : public Error {
 public:
  ParseError(std::size_t row, std::size_t col, const std::string& what)
      : Error("parse error at row " + std::to_string(row) + ", column " + std::to_string(col) + ": " + what),
        row_(row),
        col_(col) {}

  std::size_t row() const noexcept { return row_; }
  std::size_t col() const noexcept { return col_; }

 private:
  std::size_t row_;
  std::size_t col_;
};

/// A model file could not be decoded. `offset` is the byte position at which decoding stopped.
class DeserializationError : public Error {
 public:
  DeserializationError(std::size_t offset, const std::string& what)
      : Error("model deserialization failed at byte " + std::to_string(offset) + ": " + what), offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

}  // namespace rscn
