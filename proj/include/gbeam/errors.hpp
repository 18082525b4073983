#pragma once

#include <stdexcept>
#include <string>

namespace gbeam {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A sampled ray stayed inside |x| <= 2R up to s_max.
struct NonTrappingUncertain : Error { using Error::Error; };

// Hamiltonian drift exceeded tolerance; caller should refine the step.
struct StepTooLarge : Error { using Error::Error; };

// |det B| fell below threshold along a variational frame.
struct SingularFrame : Error { using Error::Error; };

// M(0) violates the admissibility conditions for beam data.
struct BadInitialHessian : Error { using Error::Error; };

// Two projection minima within the tube are indistinguishable; shrink eta.
struct AmbiguousProjection : Error { using Error::Error; };

struct MediumNotConstant : Error { using Error::Error; };
struct SingularPoint : Error { using Error::Error; };
struct OnSourcePlane : Error { using Error::Error; };
struct EmptyOverlap : Error { using Error::Error; };
struct DegenerateFit : Error { using Error::Error; };
struct ResolutionGuard : Error { using Error::Error; };
struct TrajectoryFailure : Error { using Error::Error; };
struct SchemaError : Error { using Error::Error; };

}  // namespace gbeam
