#pragma once

#include <stdexcept>
#include <string>

namespace arecloak {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed caller input: bad dimensions, non-finite entries, unparseable files.
struct InvalidInput : Error {
  using Error::Error;
};

// A mathematical precondition does not hold for this instance
// (not stabilizable/detectable, eigenvalue on the imaginary axis,
// repeated eigenvalue where a simple one is required).
struct AssumptionViolation : Error {
  using Error::Error;
};

// No eigenvalue of the current matrix admits a shift satisfying the
// requested constraints; the search was exhausted, nothing is wrong
// numerically.
struct NoAdmissibleShift : Error {
  using Error::Error;
};

// Backend failure or an unacceptable computed residual.
struct NumericError : Error {
  using Error::Error;
};

// The request is well formed but would do nothing (for example a disguise
// with zero shifts); callers distinguish this from success.
struct TrivialRequest : Error {
  using Error::Error;
};

}  // namespace arecloak
