#pragma once

#include <stdexcept>
#include <string>

namespace horoflow {

// Base for every failure raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A value left the domain where it is defined: non-finite distance, a disk
// point with |z| >= 1, a map image outside the evaluable set.
class DomainError : public Error {
 public:
  using Error::Error;
};

class NotSpdError : public DomainError {
 public:
  using DomainError::DomainError;
};

class NotDiffeomorphismError : public DomainError {
 public:
  using DomainError::DomainError;
};

// Caller supplied something unusable: bad sizes, empty inputs, every sampled
// pair coincident.
class InputError : public Error {
 public:
  using Error::Error;
};

class DegenerateInputError : public InputError {
 public:
  using InputError::InputError;
};

class SymmetryError : public InputError {
 public:
  using InputError::InputError;
};

class NormConstraintError : public InputError {
 public:
  using InputError::InputError;
};

// Too many truncated trials for a trustworthy estimate.
class EstimationError : public Error {
 public:
  using Error::Error;
};

class IntegrabilityError : public Error {
 public:
  using Error::Error;
};

// Internal invariant of a numerical kernel failed.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

}  // namespace horoflow
