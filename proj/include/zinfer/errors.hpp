#pragma once

#include <stdexcept>
#include <string>

namespace zinfer {

/// Base class for every error the library raises on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the support or admissible range of a distribution.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The inflated zero probability reached 1 (within 1e-12).
class InflationOverflow : public Error {
 public:
  explicit InflationOverflow(const std::string& where)
      : Error("inflation overflow: zero probability reached 1 at " + where)
  {
  }
};

/// A sampler could not produce a draw within its attempt budget.
class SamplingError : public Error {
 public:
  using Error::Error;
};

/// Fitting could not proceed (bad data, non-monotone type, divergence).
class FitError : public Error {
 public:
  using Error::Error;
};

}  // namespace zinfer
