#pragma once

#include <stdexcept>
#include <string>

namespace adiascat {

/// Base class for every failure raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An input violates an operation's precondition (bad parameter, support
/// leaving the grid window, pole proximity). Maps to CLI exit status 1.
class ValidationError : public Error {
 public:
  ValidationError(std::string field, const std::string& message)
      : Error(field + ": " + message), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// A wave packet or coupling does not fit the clearance a wave operator needs.
/// `required()` is the smallest admissible value of the offending quantity.
class ClearanceError : public ValidationError {
 public:
  ClearanceError(std::string field, const std::string& message, double required)
      : ValidationError(std::move(field), message), required_(required) {}

  double required() const noexcept { return required_; }

 private:
  double required_;
};

/// A numerical contract broke during a computation (unitarity drift,
/// Hermiticity residual too large). Maps to CLI exit status 2.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace adiascat
