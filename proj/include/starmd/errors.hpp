#pragma once

#include <stdexcept>
#include <string>

namespace starmd {

/// Vector length does not fit the norm or geometry it was passed to.
class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A NaN or infinite coordinate reached an operation.
class NonFiniteInput : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// The inverse mirror map did not reproduce its input within tolerance.
class RoundTripFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The generalized binary search ran out of probes. Signals that the
/// declared smoothness constants do not describe the objective.
class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Sampling certification of declared constants failed.
class CertificationFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The solver's independent re-check of the search condition failed.
class CertificationMismatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Precondition of a lower-bound construction is not met.
class PreconditionViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace starmd
