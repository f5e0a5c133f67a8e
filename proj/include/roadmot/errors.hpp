#pragma once

#include <stdexcept>
#include <string>

namespace roadmot {

// Base class for all library errors so callers can catch one type.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Pixel at or above the horizon: the viewing ray never meets the road plane.
struct DegenerateHorizon : Error {
  using Error::Error;
};

// Point with non-positive depth handed to the projection operator.
struct BehindCamera : Error {
  using Error::Error;
};

struct DimensionMismatch : Error {
  using Error::Error;
};

struct MissingFeatures : Error {
  using Error::Error;
};

struct LengthMismatch : Error {
  using Error::Error;
};

struct InputMisaligned : Error {
  using Error::Error;
};

struct EmptyGroundTruth : Error {
  using Error::Error;
};

struct InsufficientSequences : Error {
  using Error::Error;
};

// File-grammar violations carry the 1-based line number of the offending line.
struct ParseError : Error {
  ParseError(const std::string& what, int line_no)
      : Error(what + " (line " + std::to_string(line_no) + ")"), line(line_no) {}
  int line;
};

struct NegativeDimension : ParseError {
  using ParseError::ParseError;
};

struct NonOrthonormalRotation : Error {
  using Error::Error;
};

}  // namespace roadmot
