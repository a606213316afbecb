#pragma once

#include <stdexcept>
#include <string>

namespace sonarfield {

/// Bad input: scenario fields, CLI flags, or model parameters out of range.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A computation produced a non-finite or otherwise unusable result.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace sonarfield
