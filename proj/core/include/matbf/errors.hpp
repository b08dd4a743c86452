#pragma once

#include <stdexcept>
#include <string>

namespace matbf {

// Malformed user input: files, manifests, argument values.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Non-conformable shapes. Raised before any numerical work.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Argument outside the mathematical domain of an operation (alpha range,
// degrees of freedom, multivariate gamma poles, integrability guards).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Numerical breakdown on otherwise valid input.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Covariance estimate or posterior scale is not SPD.
class CovarianceError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

[[noreturn]] void throw_shape(const std::string& what);
[[noreturn]] void throw_domain(const std::string& what);

}  // namespace matbf
