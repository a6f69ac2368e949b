#pragma once

#include <stdexcept>
#include <string>

namespace torquescore {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParseError : Error {
  using Error::Error;
};

struct ValidationError : Error {
  using Error::Error;
};

struct DimensionMismatch : Error {
  using Error::Error;
};

// Euler-rate map conditioning fell below threshold (gimbal lock).
struct SingularEulerMap : Error {
  using Error::Error;
};

struct TooShort : Error {
  using Error::Error;
};

struct NonIntegerStride : Error {
  using Error::Error;
};

struct EmptyStack : Error {
  using Error::Error;
};

struct AllDegenerate : Error {
  using Error::Error;
};

struct LengthMismatch : Error {
  using Error::Error;
};

struct TooFewRecords : Error {
  using Error::Error;
};

struct EmptyStratum : Error {
  using Error::Error;
};

struct DegenerateVariance : Error {
  using Error::Error;
};

}  // namespace torquescore
