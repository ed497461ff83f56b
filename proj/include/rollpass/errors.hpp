#pragma once

#include <stdexcept>
#include <string>

namespace rollpass {

// Base class for all errors raised by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// -- curve fitting ---------------------------------------------------------
struct TooFewKnots : Error {
  using Error::Error;
};
struct NonMonotonicKnots : Error {
  using Error::Error;
};
struct CurveDomainError : Error {
  using Error::Error;
};

// -- scenario generation ---------------------------------------------------
struct NoFeasibleDiameter : Error {
  using Error::Error;
};
struct GenerationExhausted : Error {
  using Error::Error;
};

// -- rasters ---------------------------------------------------------------
struct OutOfFrame : Error {
  using Error::Error;
};
struct DimensionMismatch : Error {
  using Error::Error;
};
struct BothEmpty : Error {
  using Error::Error;
};
struct EmptyReference : Error {
  using Error::Error;
};

// -- external estimator subprocesses ---------------------------------------
struct ExternalFailure : Error {
  ExternalFailure(const std::string& what, int exit_code)
      : Error(what), exit_code(exit_code) {}
  int exit_code;
};
struct Timeout : Error {
  using Error::Error;
};

// -- planning ---------------------------------------------------------------
struct NoViablePlan : Error {
  using Error::Error;
};

}  // namespace rollpass
