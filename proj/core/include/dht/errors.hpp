#pragma once

#include <stdexcept>
#include <string>

namespace dht {

/// Bad caller input: shape mismatches, domain violations, malformed files.
class InputError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// A computation could not produce a value (e.g. every grid point indeterminate).
class EvaluationError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// ∞ − ∞ encountered while combining extended reals.
class IndeterminateError : public EvaluationError {
  public:
    using EvaluationError::EvaluationError;
};

} // namespace dht
