#pragma once

#include <stdexcept>
#include <string>

namespace vgate {

/// Error taxonomy shared across modules. Every condition the library treats as
/// exceptional gets its own type so callers (and the CLI's exit-code mapping)
/// can distinguish configuration mistakes from numerical failures.

/// A physical-parameter precondition does not hold (e.g. the two-path
/// inequality chain fails, so the closed-form minima are undefined).
struct ConditionViolated : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Grid scan + refinement failed to converge to the requested gradient norm.
struct ResolutionTooCoarse : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// gate phase requested at d=0, sin(beta)=0 where arg(0) is undefined.
struct Degenerate : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// No junction asymmetry in [0, eta) reaches the requested gate phase.
struct Unattainable : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Berry-phase overlap product collapsed (min overlap < 0.5): the flux grid
/// is too coarse to follow the ground state near its fastest rotation.
struct OverlapCollapse : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Forced measurement outcome has probability below 1e-14.
struct ImpossibleOutcome : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Repeat-until-success loop exceeded its iteration cap; indicates an algebra
/// bug rather than bad luck (success probability is 1/2 per round).
struct NonTermination : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Bus and phase ground share a connected component of on-junctions.
struct ShortCircuit : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Ground-side parity inference requested with no tare measurement on file.
struct TareMissing : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// The directly measured bus-side MZM set has odd cardinality, which is not
/// a fermion parity.
struct OddSet : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// No on/off junction assignment realizes the requested operator.
struct Unreachable : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// An iterative eigensolver failed to reach its residual tolerance within the
/// iteration budget (CLI exit code 3).
struct SolverFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Configuration/input validation failure (CLI exit code 2).
struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

} // namespace vgate
