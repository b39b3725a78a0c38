#pragma once

#include <complex>

#include "vgate/params.hpp"

namespace vgate {

/// Closed-form instanton predictions for the phase gate. The gate arises
/// from the interference of the two tunneling paths connecting the flux = pi
/// degenerate minima; the path-action difference i(S+ - S-) = i*pi*q + i*beta
/// - d controls everything below.
struct InstantonPrediction {
    double eta = 0.0;              ///< (1 - epsilon^2) / (2*alpha)
    double d = 0.0;                ///< damping (real part of action difference)
    double beta = 0.0;             ///< 2*pi*(Q1+Q2), wrapped to [0, 2*pi)
    double gate_phase_2theta = 0.0; ///< arg(sinh d + i sin beta), in (-pi, pi]
    double p_even = 0.0;           ///< |1 + e^{-d+i*beta}|
    double p_odd = 0.0;            ///< |1 - e^{-d+i*beta}|
    bool out_of_regime = false;    ///< epsilon >= eta: returned with a warning flag
    bool degenerate = false;       ///< d = 0 and sin beta = 0: gate phase undefined
};

/// Small parameter of the expansion, eta = (1 - epsilon^2) / (2*alpha).
double eta_of(const CircuitParams& p);

/// Damping d of the action difference. With symmetric capacitances
/// (c_tilde = 0) the simplified form
///     d = 4*pi*sqrt(alpha*J / (E_C*(1-eps^2))) * eps
/// is used; otherwise the general capacitance form
///     d = pi*sqrt(J*eta/(c_bar*E_C)) * (2*c_bar*eps/eta + eta*c_tilde)
/// (c_bar, c_tilde dimensionless in units of 2e^2/E_C; unit restoration
/// Phi_0*e = pi, hbar = 1), which reduces exactly to the simplified form at
/// c_bar = 2, c_tilde = 0. Returns the out-of-regime flag true when
/// epsilon >= eta (result still returned, not silently discarded).
std::pair<double, bool> action_difference_d(const CircuitParams& p);

/// Abelian phase difference beta = 2*pi*(Q1 + Q2), gate charges in
/// Cooper-pair units, wrapped to [0, 2*pi). Q1+Q2 = 0.25 gives beta = pi/2.
double action_difference_beta(const CircuitParams& p);

/// Relative gate phase between the qubit parities:
///     2*theta = arg(sinh d + i sin beta) in (-pi, pi].
/// Throws Degenerate when d = 0 and sin beta = 0.
double gate_phase(double d, double beta);

/// Relative tunneling weights of the parities:
///     p_even = |1 + e^{-d+i*beta}|,  p_odd = |1 - e^{-d+i*beta}|.
/// Equal iff cos(beta)*e^{-d} = 0; at beta = pi/2 both are
/// sqrt(1 + e^{-2d}) and the qubit splitting vanishes at leading order.
std::pair<double, double> transition_probabilities(double d, double beta);

/// The diagonal gate unitary over q in {0, 1}:
///     U = diag(e^{i*theta_0}, e^{i*theta_1}),
///     theta_q = arg(1 + (-1)^q e^{-d+i*beta}).
/// Sign convention: theta_0 - theta_1 equals gate_phase(d, beta) exactly
/// (identity: arg((1+z)/(1-z)) = arg(sinh d + i sin beta) for z = e^{-d+ibeta}).
struct GateUnitary {
    std::complex<double> u00, u11;
    double theta0 = 0.0, theta1 = 0.0;
};
GateUnitary gate_unitary(const CircuitParams& p);

/// Full prediction bundle for reports.
InstantonPrediction predict(const CircuitParams& p);

/// Largest junction asymmetry satisfying epsilon < eta(epsilon):
/// the positive root of eps^2 + 2*alpha*eps - 1 = 0, sqrt(alpha^2+1) - alpha.
double epsilon_max(double alpha);

/// Inverse design: the junction asymmetry for which gate_phase(d(eps), beta)
/// equals target_2theta, bisected to |delta 2theta| < 1e-10 on [0, eps_max).
/// For beta = pi/2 the attainable range is (0, pi/2] with eps = 0 at pi/2.
/// Throws Unattainable when the target lies outside the reachable range.
double solve_epsilon_for_phase(double target_2theta, double alpha, double e_c,
                               double beta = 0.5 * pi);

/// Idealized two-path interferometer gate U(A, B) = exp(i*arctan(|A|/|B|) sigma_z)
/// for path amplitudes A (parity-odd) and B (parity-even). qubit_independent
/// reports whether arg(A) - arg(B) = pi/2 (mod 2*pi) within 1e-12 -- the
/// condition under which transmission carries no qubit information
/// (vacuously true when either amplitude is negligible).
struct InterferometerGate {
    std::complex<double> u00, u11;
    bool qubit_independent = false;
};
InterferometerGate interferometer_gate(std::complex<double> amp_above,
                                       std::complex<double> amp_below);

} // namespace vgate
