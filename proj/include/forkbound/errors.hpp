#pragma once

#include <stdexcept>

namespace forkbound {

// Error taxonomy used across the library. Every rejected input throws one of
// these; numeric routines do not return NaN to signal failure.

// Argument outside the mathematical domain of an operation (theta past an MGF
// pole, invalid thinning probability, l out of [1,k], ...).
struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// No admissible decay parameter exists: the service rate parameter is not
// below the arrival rate parameter anywhere in the domain.
struct StabilityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A feasibility precondition of an allocation or envelope composition fails
// (rate exceeds capacity, empty parameter region, ...).
struct InfeasibleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A composition that requires independent parallel servers was requested with
// dependent ones.
struct IndependenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Mismatched sequence lengths.
struct ShapeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// An estimator was asked for results without samples.
struct EmptyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed textual input (distribution literals, CLI values).
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace forkbound
