#pragma once

#include <stdexcept>
#include <string>

namespace entrex {

/// Input violates a documented precondition (non-finite entries, bad sizes, ...).
struct InvalidInput : std::invalid_argument {
    explicit InvalidInput(const std::string& what) : std::invalid_argument(what) {}
};

/// Adaptive step size collapsed below the hard floor; the problem is too stiff
/// for the explicit integrator.
struct StiffnessError : std::runtime_error {
    explicit StiffnessError(const std::string& what) : std::runtime_error(what) {}
};

/// A vector field was evaluated outside the set where it is defined.
struct FlowDomainError : std::domain_error {
    explicit FlowDomainError(const std::string& what) : std::domain_error(what) {}
};

/// Too many samples of a spectral quantity failed to converge to trust the series.
struct DegradedQualityError : std::runtime_error {
    explicit DegradedQualityError(const std::string& what) : std::runtime_error(what) {}
};

/// No usable in-region data: every sample fell outside the gate.
struct NoSignalError : std::runtime_error {
    explicit NoSignalError(const std::string& what) : std::runtime_error(what) {}
};

/// Operation is not implemented for this manifold representation.
struct UnsupportedManifoldKind : std::invalid_argument {
    explicit UnsupportedManifoldKind(const std::string& what) : std::invalid_argument(what) {}
};

/// Malformed input file; carries the 1-based line number when known.
struct ParseError : std::runtime_error {
    explicit ParseError(const std::string& what, long line = -1)
        : std::runtime_error(line >= 0 ? what + " (line " + std::to_string(line) + ")" : what),
          line_number(line) {}
    long line_number;
};

}  // namespace entrex
