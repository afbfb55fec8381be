#pragma once

#include <stdexcept>
#include <string>

namespace varsketch {

// Base class for everything this library throws on purpose.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Operands disagree on dimensions or layout.
struct ShapeMismatch : Error {
    using Error::Error;
};

// A matrix that must be Hermitian positive semi-definite is not,
// beyond the tolerated jitter.
struct NotPSD : Error {
    using Error::Error;
};

// A statistical estimate was requested from fewer samples than the
// contract allows.
struct TooFewSamples : Error {
    using Error::Error;
};

// A requested construction (mask density, calibration size, ...) cannot
// be realized within its stated tolerance.
struct InfeasibleSpec : Error {
    using Error::Error;
};

// A problem size exceeds what an exact/dense code path is willing to
// materialize.
struct SizeLimit : Error {
    using Error::Error;
};

// A comparison reference is constant or all-zero, so the requested
// statistic is undefined.
struct DegenerateReference : Error {
    using Error::Error;
};

// Invalid or inconsistent experiment configuration.
struct ConfigError : Error {
    using Error::Error;
};

// Filesystem-level failure while reading or writing artifacts.
struct IoError : Error {
    using Error::Error;
};

} // namespace varsketch
