#pragma once

#include <stdexcept>
#include <string>

namespace novlab {

// Base for everything thrown by the library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A caller passed a value outside the documented range (c <= 0, bad kernel
// tag, gamma outside (0, E), ...).
struct InvalidParameter : Error {
    using Error::Error;
};

// Structural precondition violated (unordered positions, non-monotone frame,
// field not in the admissible sign class, snapshots too sparse, ...).
struct PreconditionError : Error {
    using Error::Error;
};

// A smoothing kernel too narrow for the grid spacing.
struct ResolutionError : Error {
    using Error::Error;
};

// Requested operation is undefined for the given data (zero-mass edge, ...).
struct UndefinedEdge : Error {
    using Error::Error;
};

// Orthogonality root lost its bracket; carries the time of loss.
struct ModulationLoss : Error {
    double time = 0.0;
    ModulationLoss(const std::string& what, double t) : Error(what), time(t) {}
};

// No smoothing-index candidate passed calibration.
struct CalibrationError : Error {
    using Error::Error;
};

// Input data the scheme cannot meaningfully process (spike-like momentum
// where a smooth density is required, ...).
struct UnsupportedInput : Error {
    using Error::Error;
};

// A solver self-check failed; indicates a bug, not bad user input.
struct InternalError : Error {
    using Error::Error;
};

// Malformed configuration file / unknown key / missing required field.
struct ConfigError : Error {
    using Error::Error;
};

} // namespace novlab
