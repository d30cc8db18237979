#pragma once

#include <stdexcept>
#include <string>

namespace nlskp {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : Error {
  using Error::Error;
};

struct DomainError : Error {
  using Error::Error;
};

struct PreconditionViolation : Error {
  using Error::Error;
};

struct ZeroMeanViolation : Error {
  using Error::Error;
};

struct UnwrapAmbiguity : Error {
  using Error::Error;
};

struct AmplitudeBound : Error {
  using Error::Error;
};

struct NonFinite : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

struct FormatError : IoError {
  using IoError::IoError;
};

// |psi| fell under the vortex floor; t is the scaled time of the failing check
struct VortexDetected : Error {
  double t;
  double min_modulus;
  VortexDetected(double t_, double m)
      : Error("vortex detected at t=" + std::to_string(t_) +
              " (min |psi| = " + std::to_string(m) + ")"),
        t(t_), min_modulus(m) {}
};

inline constexpr double vortex_floor = 0.25;

}  // namespace nlskp
