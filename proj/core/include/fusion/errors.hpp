// errors.hpp - Named exception types thrown by the library's contract
// violations. Each carries a human-readable message; a few carry a payload
// (e.g. the facet witnessing an irregular partition).
#pragma once

#include <stdexcept>
#include <string>

namespace fusion {

#define FUSION_DEFINE_ERROR(NAME)                                      \
  class NAME : public std::runtime_error {                             \
   public:                                                             \
    explicit NAME(const std::string& what) : std::runtime_error(what) {} \
  }

FUSION_DEFINE_ERROR(ZeroMass);
FUSION_DEFINE_ERROR(OutOfDomain);
FUSION_DEFINE_ERROR(MassMismatch);
FUSION_DEFINE_ERROR(NotDominated);
FUSION_DEFINE_ERROR(NoCommonInterior);
FUSION_DEFINE_ERROR(EpsTooLarge);
FUSION_DEFINE_ERROR(AtomOnBoundary);
FUSION_DEFINE_ERROR(EmptyCell);
FUSION_DEFINE_ERROR(PreconditionFailed);
FUSION_DEFINE_ERROR(NoFeasibleDelta);
FUSION_DEFINE_ERROR(Eq1Violated);
FUSION_DEFINE_ERROR(NotUnique);
FUSION_DEFINE_ERROR(ConvexityBroken);
FUSION_DEFINE_ERROR(DegenerateSamples);
FUSION_DEFINE_ERROR(StallDetected);
FUSION_DEFINE_ERROR(MalformedScenario);

#undef FUSION_DEFINE_ERROR

// Thrown when a candidate partition admits no continuous piecewise-affine
// lift, i.e. it is not a regular (power-diagram) subdivision. Carries the
// pair of adjacent cells whose shared facet breaks the gradient condition.
class NotRegular : public std::runtime_error {
 public:
  NotRegular(const std::string& what, int cell_a, int cell_b)
      : std::runtime_error(what), cell_a(cell_a), cell_b(cell_b) {}
  int cell_a = -1;
  int cell_b = -1;
};

}  // namespace fusion
