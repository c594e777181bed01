#pragma once

#include <stdexcept>
#include <string>

namespace zinpaint {

// Base class for all engine errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Mismatched or degenerate tensor shapes.
struct ShapeError : Error {
  using Error::Error;
};

// Invalid values: out of range, non-finite, bad enum, bad config.
struct ValueError : Error {
  using Error::Error;
};

// File and serialization problems.
struct IoError : Error {
  using Error::Error;
};

// Non-finite losses or gradients encountered mid-run.
struct NumericError : Error {
  using Error::Error;
};

}  // namespace zinpaint
