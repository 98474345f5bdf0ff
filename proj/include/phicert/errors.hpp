#pragma once

#include <stdexcept>
#include <string>

namespace phicert {

// Base class for every domain error raised by the library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EmptyCone : Error { using Error::Error; };
struct NotDistinct : Error { using Error::Error; };
struct MixedResidue : Error { using Error::Error; };
struct DimensionMismatch : Error { using Error::Error; };
struct BadGap : Error { using Error::Error; };
struct Inconsistent : Error { using Error::Error; };
struct ZeroArgument : Error { using Error::Error; };
struct SplitExtension : Error { using Error::Error; };
struct Degenerate : Error { using Error::Error; };
struct GridTooLarge : Error { using Error::Error; };

struct StepFailed : Error {
  StepFailed(int step_, std::size_t place_, const std::string& why)
      : Error("step " + std::to_string(step_) + " failed at place " + std::to_string(place_) + ": " + why),
        step(step_), place(place_) {}
  int step;
  std::size_t place;
};

}  // namespace phicert
