#pragma once

#include <cstdint>
#include <vector>

#include "vgate/lanczos.hpp"
#include "vgate/params.hpp"

namespace vgate {

/// Two-island charge-basis Hamiltonian at fixed flux, held implicitly (the
/// hopping structure is applied on the fly; only the charging diagonal is
/// stored). Basis order: index = i1 * side + i2 with n_j = i_j - n_cutoff.
///
///   H = E_C [(n1 - Q1_eff)^2 + (n2 - Q2)^2]
///       - J1/2 (|n1+1><n1| + h.c.) - J2/2 (e^{-i flux}|n2+1><n2| + h.c.)
///       - J3/2 (|n1+1, n2-1><n1, n2| + h.c.)
///
/// in the default flux-on-J2 gauge (Fourier convention <phi|n> = e^{-i n phi},
/// so e^{-i phi} raises n). Q1_eff = q_gate_1 + q_parity/2 in Cooper-pair
/// units: the wire parity couples one electron charge. The gauge enum moves
/// the flux factor onto J1 (as e^{+i flux}) or J3 (as e^{-i flux}) via the
/// constant phase shifts phi -> phi +- flux, which are exact lattice
/// translations of the charge basis; all three gauges are isospectral and
/// give identical closed-loop Berry phases. The flux is wrapped to (-pi, pi]
/// before the phase factor is taken, so H(2*pi) == H(0) bitwise.
struct ChargeHamiltonian {
    CircuitParams params;
    ChargeBasisSpec spec;
    FluxGauge gauge = FluxGauge::on_j2;
    double flux = 0.0; ///< as requested by the caller (unwrapped)
    int q_parity = 0;

    int side = 0;
    std::size_t dim = 0;
    std::vector<double> diag; ///< charging term
    cxd hop1, hop2, hop3;     ///< raising-type matrix elements (see above)

    /// out = H * in. Each output entry is a pure function of `in`, so the
    /// parallel path is bitwise-identical to the serial one.
    void apply(const cvec& in, cvec& out, int n_threads = 1) const;

    /// Dense column-major copy (tests and small problems only).
    std::vector<cxd> dense() const;

    /// Upper bound estimate of ||H||_2 used as the solver scale.
    double scale_hint() const;
};

ChargeHamiltonian build_hamiltonian(const CircuitParams& params, double flux,
                                    int q_parity, const ChargeBasisSpec& spec,
                                    FluxGauge gauge = FluxGauge::on_j2);

/// One diagonalization result at fixed flux.
struct SpectralSnapshot {
    double flux = 0.0;
    double ground_energy = 0.0;
    double first_gap = 0.0; ///< E1 - E0 of the same parity sector
    cvec ground_state;      ///< unit norm; largest-|.| component real-positive
    bool degenerate_ground = false; ///< first_gap < 1e-13 * J
};

/// Numerical knobs for the eigensolves. Everything is deterministic: seeds
/// feed splitmix64 streams, all reductions are serial, and the flux grid is
/// cut into fixed-size chunks (a pure function of the grid, never of the
/// thread count) whose first point is solved cold and the rest warm-started
/// in order, so any thread count produces bitwise-identical sweeps.
struct SolveOptions {
    double tol = 5e-13;
    int max_iter = 2000;
    int chunk = 32; ///< warm-start chain length along the flux grid
    std::uint64_t seed = 0x76a5e0c3d1b2f984ull;
    int n_threads = 1;
};

SpectralSnapshot ground_snapshot(const ChargeHamiltonian& h,
                                 const SolveOptions& opt = {});

/// Berry phase of the parity-q ground state around the flux loop.
struct BerryPhaseResult {
    double phase = 0.0;          ///< in (-pi, pi]
    double min_overlap = 1.0;    ///< min over links of |<psi_n|psi_{n+1}>|
    int n_steps = 0;             ///< grid points used (loop closed on step 0)
    std::vector<double> grid;    ///< flux values
    std::vector<double> energies; ///< ground energy per point
    std::vector<double> gaps;     ///< first gap per point
};

/// Product of step overlaps along the sweep grid, loop closed by reusing the
/// flux = 0 eigenvector as the 2*pi endpoint. Interior global-phase choices
/// cancel in the closed product. Throws OverlapCollapse if any link overlap
/// magnitude drops below 0.5.
BerryPhaseResult berry_phase(const CircuitParams& params, int q_parity,
                             const SweepConfig& sweep,
                             const ChargeBasisSpec& spec,
                             FluxGauge gauge = FluxGauge::on_j2,
                             const SolveOptions& opt = {});

/// theta_Berry(q=1) - theta_Berry(q=0), reduced to (-pi, pi].
struct QubitPhaseReport {
    double phase = 0.0;
    double min_overlap = 1.0; ///< min over both parity sweeps
    BerryPhaseResult berry_q0, berry_q1;
};
QubitPhaseReport qubit_phase_report(const CircuitParams& params,
                                    const SweepConfig& sweep,
                                    const ChargeBasisSpec& spec,
                                    FluxGauge gauge = FluxGauge::on_j2,
                                    const SolveOptions& opt = {});
double qubit_phase(const CircuitParams& params, const SweepConfig& sweep,
                   const ChargeBasisSpec& spec,
                   FluxGauge gauge = FluxGauge::on_j2,
                   const SolveOptions& opt = {});

/// Per-flux-point ground energies of both parity sectors and their gaps.
struct SplittingPoint {
    double flux = 0.0;
    double gap_q0 = 0.0, gap_q1 = 0.0;
    double e0_q0 = 0.0, e0_q1 = 0.0;
    double splitting = 0.0; ///< E(flux, q=1) - E(flux, q=0), signed
};
std::vector<SplittingPoint> qubit_splitting_profile(
    const CircuitParams& params, const SweepConfig& sweep,
    const ChargeBasisSpec& spec, FluxGauge gauge = FluxGauge::on_j2,
    const SolveOptions& opt = {});

/// zeta = [min over flux of min(gap_q0, gap_q1)] / [max over flux of
/// |splitting|], both extrema taken on the same grid.
struct DynamicalRange {
    double zeta = 0.0;
    double min_gap = 0.0;
    double max_splitting = 0.0;
    bool infinite_range = false; ///< max splitting < 1e-15 * J; zeta capped at 1e15
};
DynamicalRange dynamical_range(const CircuitParams& params,
                               const SweepConfig& sweep,
                               const ChargeBasisSpec& spec,
                               FluxGauge gauge = FluxGauge::on_j2,
                               const SolveOptions& opt = {});
DynamicalRange dynamical_range_from_profile(
    const std::vector<SplittingPoint>& profile, double j_unit);

/// theta_dyn = (1/sweep_rate) * closed trapezoidal integral over flux of the
/// signed splitting E(flux, 1) - E(flux, 0). Radians when energies are in J
/// and the rate in radians per 1/J.
double dynamical_phase(const CircuitParams& params, double sweep_rate,
                       const SweepConfig& sweep, const ChargeBasisSpec& spec,
                       FluxGauge gauge = FluxGauge::on_j2,
                       const SolveOptions& opt = {});
double dynamical_phase_from_profile(const std::vector<SplittingPoint>& profile,
                                    double sweep_rate);

/// Numeric qubit phase across a junction-asymmetry grid (all other template
/// parameters held fixed). epsilon values must lie in [0, 0.15].
struct PhaseSweepRow {
    double epsilon = 0.0;
    double phase = 0.0;
    double min_overlap = 1.0;
};
std::vector<PhaseSweepRow> phase_vs_epsilon_sweep(
    const CircuitParams& params_template, const std::vector<double>& epsilon_grid,
    const SweepConfig& sweep, const ChargeBasisSpec& spec,
    FluxGauge gauge = FluxGauge::on_j2, const SolveOptions& opt = {});

} // namespace vgate
