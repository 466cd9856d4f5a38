#pragma once

#include <stdexcept>
#include <string>

namespace idnc {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// g = b = 0: the chain has no unique stationary distribution.
struct DegenerateChain : Error {
  using Error::Error;
};

/// Conditioning on an observation that has probability zero.
struct ImpossibleObservation : Error {
  using Error::Error;
};

/// Stationary erasure probability >= 1; completion time undefined.
struct SaturatedChannel : Error {
  using Error::Error;
};

/// Operation undefined for the given state (e.g. delay of a satisfied user).
struct NotApplicable : Error {
  using Error::Error;
};

/// Exhaustive solver invoked past its size cap.
struct TooLarge : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

}  // namespace idnc
