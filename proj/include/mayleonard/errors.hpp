#pragma once

#include <stdexcept>
#include <string>

namespace mayleonard {

/// Base of every numerical signal raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A computation produced a value outside the finite range of the scalar.
class OverflowError : public Error {
public:
  using Error::Error;
};

/// A linear system (or a rank decision) is numerically singular.
class SingularError : public Error {
public:
  using Error::Error;
};

/// The closed-form denominator vanishes (pole / finite-time blow-up).
class SingularityError : public Error {
public:
  using Error::Error;
};

/// Rescaling by a growth rate that is (numerically) zero.
class ZeroEtaError : public Error {
public:
  using Error::Error;
};

/// A rank classification landed inside the ambiguous band around the
/// pivot threshold; the solver refuses to guess.
class IllConditionedError : public Error {
public:
  using Error::Error;
};

/// Random instance generation ran out of retries.
class ExhaustionError : public Error {
public:
  using Error::Error;
};

/// Convergence-order fit hit the round-off floor.
class DegenerateErrorSignal : public Error {
public:
  using Error::Error;
};

}  // namespace mayleonard
