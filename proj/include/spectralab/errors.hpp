#pragma once

#include <stdexcept>
#include <string>

namespace spectralab {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InvalidArity : Error { using Error::Error; };
struct ArityTooLarge : Error { using Error::Error; };
struct NotTwoEigenvalue : Error { using Error::Error; };
struct Degenerate : Error { using Error::Error; };
struct MixedEigenvalues : Error { using Error::Error; };
struct ArityMismatch : Error { using Error::Error; };
struct NotBalanced : Error { using Error::Error; };
struct BudgetExceeded : Error { using Error::Error; };
struct NearPole : Error { using Error::Error; };
struct NonIntegerMultiplicity : Error { using Error::Error; };
struct CardinalityMismatch : Error { using Error::Error; };
struct TooLarge : Error { using Error::Error; };
struct BallTooLarge : Error { using Error::Error; };
struct SupportTouchesBoundary : Error { using Error::Error; };
struct ZeroVector : Error { using Error::Error; };
struct NotSymmetric : Error { using Error::Error; };
struct NoConvergence : Error { using Error::Error; };
struct OutOfModel : Error { using Error::Error; };
struct ParseError : Error { using Error::Error; };

} // namespace spectralab
