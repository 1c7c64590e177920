#pragma once

#include <stdexcept>
#include <string>

namespace orbitflow {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Dimension mismatches and malformed arguments.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// A point lies outside the subspace an operation is defined on.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Structure constants, subalgebras or splittings that fail validation.
class StructuralError : public Error {
 public:
  using Error::Error;
};

/// Non-finite function values or gradients.
class EvaluationError : public Error {
 public:
  using Error::Error;
};

/// An invariant of the library itself was violated (singular Gram matrix
/// after validation, disagreeing cross-checks, ...).
class InternalError : public Error {
 public:
  using Error::Error;
};

/// Integration produced a non-finite state.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, std::size_t last_valid) : Error(what), last_valid_(last_valid) {}
  std::size_t last_valid_index() const noexcept { return last_valid_; }

 private:
  std::size_t last_valid_;
};

/// Configuration files that cannot be read or are malformed.
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace orbitflow
