#pragma once

#include <stdexcept>
#include <string>

namespace cosserat {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Rotation-vector norm at a multiple of 2*pi: the body-rate map is not invertible.
struct SingularParameterization : Error {
  using Error::Error;
};

// Grid smaller than the minimum a stencil or integrator needs.
struct GridTooSmall : Error {
  using Error::Error;
};

// Input rate fields violate the compatibility conditions: path-dependent recovery.
struct InconsistentFields : Error {
  using Error::Error;
};

// A state component left the representable range during time stepping.
struct NumericalBlowup : Error {
  using Error::Error;
};

// Stable-step search found no stable dt within the requested range.
struct NoStableStep : Error {
  using Error::Error;
};

// Iterative solve did not reach the requested residual within max_iter.
struct NoConvergence : Error {
  using Error::Error;
};

// Metrics requested from a trace with no usable frames.
struct EmptyTrace : Error {
  using Error::Error;
};

// Config text could not be parsed (reported with line number).
struct ParseError : Error {
  using Error::Error;
};

// Parsed config violates a documented constraint or contains an unknown key.
struct ValidationError : Error {
  using Error::Error;
};

// Filesystem failure while reading or writing artifacts.
struct IoError : Error {
  using Error::Error;
};

}  // namespace cosserat
