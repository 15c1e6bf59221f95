#pragma once

#include <stdexcept>
#include <string>

namespace shocklab {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// A state was used where entropy derivatives are undefined (vacuum,
/// non-positive internal energy, or outside the admissible box).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Invalid or degenerate input to a sampling-based estimator.
class DegenerateInput : public Error {
public:
    using Error::Error;
};

/// Bad configuration file or constructor parameters.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A curve parameter left its admissible range.
class RangeError : public Error {
public:
    using Error::Error;
};

/// Predictor-corrector continuation failed to converge after step halving.
class ContinuationStall : public Error {
public:
    using Error::Error;
};

/// The tracked extremal eigenvalue lost its spectral gap.
class EigenvalueCollision : public Error {
public:
    using Error::Error;
};

/// A state pair does not satisfy the jump relations to tolerance.
class NotADiscontinuity : public Error {
public:
    using Error::Error;
};

/// Adaptive quadrature exceeded its refinement depth limit.
class QuadratureFailure : public Error {
public:
    using Error::Error;
};

/// A cell state left the admissible closure during time stepping.
class BlowUp : public Error {
public:
    using Error::Error;
};

/// A position left the valid part of the computational domain.
class OutOfDomain : public Error {
public:
    using Error::Error;
};

/// Waves reached the pinned far-field boundary cells during a run.
class BoundaryBreach : public Error {
public:
    using Error::Error;
};

} // namespace shocklab
