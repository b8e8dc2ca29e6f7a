#pragma once

#include <stdexcept>
#include <string>

namespace descent {

// Base of every error raised by the library. The concrete type names the
// failure mode; what() carries the numbers that triggered it.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define DESCENT_DEFINE_ERROR(Name)            \
  class Name : public Error {                 \
   public:                                    \
    using Error::Error;                       \
  }

// model
DESCENT_DEFINE_ERROR(DomainError);
DESCENT_DEFINE_ERROR(OverflowSignal);
DESCENT_DEFINE_ERROR(GridTooSmall);

// quad
DESCENT_DEFINE_ERROR(StiffnessFailure);
DESCENT_DEFINE_ERROR(TailUnresolved);
DESCENT_DEFINE_ERROR(DepthExceeded);
DESCENT_DEFINE_ERROR(BoundInvalid);
DESCENT_DEFINE_ERROR(SeriesDiverges);
DESCENT_DEFINE_ERROR(NoLimit);

// sde
DESCENT_DEFINE_ERROR(StepTooLarge);
DESCENT_DEFINE_ERROR(DeltaTooLarge);

// spectral
DESCENT_DEFINE_ERROR(EigenNotSeparated);
DESCENT_DEFINE_ERROR(TailNotPlateaued);
DESCENT_DEFINE_ERROR(TruncationDominates);

// stats
DESCENT_DEFINE_ERROR(InsufficientSample);
DESCENT_DEFINE_ERROR(WindowTooNoisy);

#undef DESCENT_DEFINE_ERROR

}  // namespace descent
