#pragma once

#include <stdexcept>
#include <string>

namespace clc {

/// Malformed or out-of-range user configuration (CLI exit code 2).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A numerical guard tripped: truncation, aliasing, dimension or overflow
/// limits (CLI exit code 3).
struct PhysicsGuardError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TruncationError : PhysicsGuardError {
  TruncationError(const std::string& what, double deficit)
      : PhysicsGuardError(what), deficit(deficit) {}
  double deficit;
};

struct AliasingError : PhysicsGuardError {
  using PhysicsGuardError::PhysicsGuardError;
};

/// Requested frequency lies outside the tabulated spectrum.
struct GridCoverageError : std::out_of_range {
  using std::out_of_range::out_of_range;
};

}  // namespace clc
