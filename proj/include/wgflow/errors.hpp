#pragma once

#include <stdexcept>
#include <string>

namespace wgflow {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Two inputs are structurally incompatible (e.g. densities on different intervals).
class ConfigurationError : public Error {
 public:
  using Error::Error;
};

/// Node positions of a transport map are not strictly increasing with the required gap.
class MonotonicityError : public Error {
 public:
  using Error::Error;
};

/// A density cannot be represented by a monotone map at the requested resolution.
class DegenerateQuantileError : public Error {
 public:
  using Error::Error;
};

/// A flow step destroyed monotonicity or left the domain.
class StepTooLargeError : public Error {
 public:
  using Error::Error;
};

/// Non-finite value encountered while evaluating a functional.
class EvaluationError : public Error {
 public:
  using Error::Error;
};

/// A mobility derivative was requested at zero without a declared limit.
class MobilityDegeneracyError : public Error {
 public:
  using Error::Error;
};

/// Mobility with inadmissible declared constants.
class InvalidMobilityError : public Error {
 public:
  using Error::Error;
};

/// Input violates a documented precondition (symmetry, tracelessness, admissibility).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Run configuration failed validation; the message names the failing clause.
class ValidationError : public Error {
 public:
  using Error::Error;
};

}  // namespace wgflow
