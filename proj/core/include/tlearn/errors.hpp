#pragma once

#include <stdexcept>
#include <string>

namespace tlearn {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shapes of operands do not agree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A parameter lies outside its admissible range.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// A scalar argument lies outside the domain of a function.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Input is structurally valid but degenerate (zero pilot, constant image).
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

/// Linear-algebra kernel failed or produced non-finite output.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Malformed file contents. `offset()` is the byte position of the problem.
class FormatError : public Error {
 public:
  FormatError(const std::string& what, std::size_t offset)
      : Error(what + " (at byte " + std::to_string(offset) + ")"),
        offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

}  // namespace tlearn
