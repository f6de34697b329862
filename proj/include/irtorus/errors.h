#pragma once

#include <stdexcept>
#include <string>

namespace irtorus {

struct DimensionMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Quadrature grid violates the exactness preconditions of a norm computation.
struct GridTooCoarse : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Rational (or numerically rational) coefficients where an irrational
/// vector is required.
struct NonGeneric : std::domain_error {
  using std::domain_error::domain_error;
};

/// A term 1/||beta.k|| with ||beta.k|| = 0.
struct DivergentTerm : std::domain_error {
  using std::domain_error::domain_error;
};

/// A requested table would exceed the configured memory budget.
struct MemoryLimitExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Rejection sampling gave up.
struct RejectionLimitExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace irtorus
