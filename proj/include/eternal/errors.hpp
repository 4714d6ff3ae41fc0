#pragma once

#include <stdexcept>
#include <string>

namespace eternal {

// Each failure mode named by the contracts gets its own type so callers (and the
// CLI exit-code table) can dispatch on it.
#define ETERNAL_ERROR(Name)                                                    \
  class Name : public std::runtime_error {                                     \
   public:                                                                     \
    explicit Name(const std::string& what) : std::runtime_error(#Name ": " + what) {} \
  }

ETERNAL_ERROR(RangeViolation);
ETERNAL_ERROR(DegenerateState);
ETERNAL_ERROR(SeriesOutOfRange);
ETERNAL_ERROR(StepFailure);
ETERNAL_ERROR(BracketFailure);
ETERNAL_ERROR(NonMonotoneWitness);
ETERNAL_ERROR(WrongRegime);
ETERNAL_ERROR(InsufficientTail);
ETERNAL_ERROR(ExtrapolationError);
ETERNAL_ERROR(BarrierTooLow);
ETERNAL_ERROR(CflFailure);
ETERNAL_ERROR(DomainTooSmall);

#undef ETERNAL_ERROR

}  // namespace eternal
