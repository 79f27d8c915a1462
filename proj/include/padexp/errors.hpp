#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace padexp {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed textual input. `position` is a 0-based byte offset into the
/// offending string.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : Error(what + " (at position " + std::to_string(position) + ")"),
        position_(position) {}

  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

/// A computation would exceed the configured enumeration budget or the
/// 64-bit modular/count range.
class BudgetError : public Error {
 public:
  BudgetError(const std::string& what, long double required, long double available)
      : Error(what), required_(required), available_(available) {}

  long double required() const { return required_; }
  long double available() const { return available_; }

 private:
  long double required_;
  long double available_;
};

/// Input is well formed but outside the domain of the operation
/// (level too low, uncertified series, dimension mismatch, ...).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

class FitError : public Error {
 public:
  enum class Kind { InsufficientData, ExactVanishing };

  FitError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}

  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

}  // namespace padexp
