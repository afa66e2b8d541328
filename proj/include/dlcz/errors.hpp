#pragma once

#include <stdexcept>
#include <string>

namespace dlcz {

/// Base class for all library errors so callers can catch one type.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A cavity element sequence whose composite permutation is not the identity.
struct NonReproducingCavity : Error {
    using Error::Error;
};

/// A traced ray exceeded the configured small-angle bound.
struct ParaxialViolation : Error {
    using Error::Error;
};

/// A probability expression left [0, 1] for the given parameters.
struct ProbabilityOverflow : Error {
    using Error::Error;
};

/// Closed-form denominator vanished (e.g. no noise and no excitation).
struct DegenerateDenominator : Error {
    using Error::Error;
};

/// Argument outside the mathematical domain of a model function.
struct DomainError : Error {
    using Error::Error;
};

/// Estimator asked to condition on heralds when none were recorded.
struct NoStokesCounts : Error {
    using Error::Error;
};

/// Estimator denominator has no statistics (e.g. no accidental counts).
struct ZeroDenominator : Error {
    using Error::Error;
};

/// Fit input cannot constrain the parameters (too few or collinear points).
struct DegenerateData : Error {
    using Error::Error;
};

/// Input text is not syntactically valid (position included in message).
struct ParseError : Error {
    using Error::Error;
};

/// Structurally valid input violating one or more declared constraints.
/// The message lists every violated constraint, not just the first.
struct ValidationError : Error {
    using Error::Error;
};

/// Filesystem failure while reading or writing artifacts.
struct IoError : Error {
    using Error::Error;
};

} // namespace dlcz
