#include "vgate/instanton.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

#include "vgate/errors.hpp"

namespace vgate {

double eta_of(const CircuitParams& p) {
    const double eps = p.epsilon();
    return (1.0 - eps * eps) / (2.0 * p.alpha());
}

std::pair<double, bool> action_difference_d(const CircuitParams& p) {
    p.validate();
    const double eps = std::abs(p.epsilon());
    const double eta = eta_of(p);
    const bool out_of_regime = (eps >= eta);
    double d;
    if (p.c_tilde == 0.0 && p.c_bar == 2.0) {
        // Simplified symmetric-capacitance form.
        d = 4.0 * pi * std::sqrt(p.alpha() * p.j() / (p.e_c * (1.0 - eps * eps))) * eps;
    } else {
        // General capacitance matrix: c_bar = mean, c_tilde = relative
        // asymmetry of the island charging energies.
        if (p.c_bar <= 0.0)
            throw ConfigError("action_difference_d: c_bar must be positive");
        d = pi * std::sqrt(p.j() * eta / (p.c_bar * p.e_c)) *
            (2.0 * p.c_bar * eps / eta + eta * p.c_tilde);
    }
    return {d, out_of_regime};
}

double action_difference_beta(const CircuitParams& p) {
    return wrap_2pi(2.0 * pi * (p.q_gate_1 + p.q_gate_2));
}

double gate_phase(double d, double beta) {
    const double x = std::sinh(d);
    const double y = std::sin(beta);
    if (std::abs(x) < 1e-300 && std::abs(y) < 1e-300)
        throw Degenerate("gate_phase: d = 0 and sin(beta) = 0, phase undefined");
    return std::atan2(y, x);
}

std::pair<double, double> transition_probabilities(double d, double beta) {
    const std::complex<double> z = std::exp(std::complex<double>(-d, beta));
    return {std::abs(1.0 + z), std::abs(1.0 - z)};
}

GateUnitary gate_unitary(const CircuitParams& p) {
    const auto [d, oor] = action_difference_d(p);
    (void)oor;
    const double beta = action_difference_beta(p);
    const std::complex<double> z = std::exp(std::complex<double>(-d, beta));
    GateUnitary g;
    const std::complex<double> a0 = 1.0 + z;
    const std::complex<double> a1 = 1.0 - z;
    g.theta0 = std::arg(a0);
    g.theta1 = std::arg(a1);
    g.u00 = std::polar(1.0, g.theta0);
    g.u11 = std::polar(1.0, g.theta1);
    return g;
}

InstantonPrediction predict(const CircuitParams& p) {
    InstantonPrediction out;
    out.eta = eta_of(p);
    const auto [d, oor] = action_difference_d(p);
    out.d = d;
    out.out_of_regime = oor;
    out.beta = action_difference_beta(p);
    const auto [pe, po] = transition_probabilities(d, out.beta);
    out.p_even = pe;
    out.p_odd = po;
    if (std::abs(std::sinh(d)) < 1e-300 && std::abs(std::sin(out.beta)) < 1e-300) {
        out.degenerate = true;
        out.gate_phase_2theta = 0.0;
    } else {
        out.gate_phase_2theta = gate_phase(d, out.beta);
    }
    return out;
}

double epsilon_max(double alpha) {
    if (alpha <= 0.0)
        throw ConfigError("epsilon_max: alpha must be positive");
    return std::sqrt(alpha * alpha + 1.0) - alpha;
}

double solve_epsilon_for_phase(double target_2theta, double alpha, double e_c,
                               double beta) {
    if (alpha <= 0.0 || e_c <= 0.0)
        throw ConfigError("solve_epsilon_for_phase: alpha and e_c must be positive");
    const double lim = gate_phase(0.0, beta); // d = 0 endpoint (max |phase|)
    if (!(target_2theta > 0.0) || target_2theta > lim + 1e-15)
        throw Unattainable("solve_epsilon_for_phase: target outside (0, " +
                           std::to_string(lim) + "]");
    const double phase_at = [&](double eps) {
        CircuitParams p = CircuitParams::from_asymmetry(eps, alpha, e_c,
                                                        beta / (2.0 * pi));
        const auto [d, oor] = action_difference_d(p);
        (void)oor;
        return gate_phase(d, beta);
    }(0.0);
    if (std::abs(target_2theta - phase_at) < 1e-15) return 0.0;

    auto f = [&](double eps) {
        CircuitParams p = CircuitParams::from_asymmetry(eps, alpha, e_c,
                                                        beta / (2.0 * pi));
        const auto [d, oor] = action_difference_d(p);
        (void)oor;
        return gate_phase(d, beta) - target_2theta;
    };

    // gate_phase decreases monotonically in d (for sin(beta) > 0), and d
    // increases monotonically in eps, so f is monotone on [0, eps_hi].
    double lo = 0.0;
    double hi = epsilon_max(alpha) * (1.0 - 1e-12);
    double flo = f(lo);
    double fhi = f(hi);
    if (flo < 0.0)
        throw Unattainable("solve_epsilon_for_phase: target above d = 0 limit");
    if (fhi > 0.0)
        throw Unattainable("solve_epsilon_for_phase: target below the "
                           "eps -> eps_max damping limit");
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (std::abs(fm) < 1e-10 || 0.5 * (hi - lo) < 1e-17) {
            return mid;
        }
        if ((fm > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    throw Unattainable("solve_epsilon_for_phase: bisection failed to converge");
}

InterferometerGate interferometer_gate(std::complex<double> amp_above,
                                       std::complex<double> amp_below) {
    const double a = std::abs(amp_above);
    const double b = std::abs(amp_below);
    if (a == 0.0 && b == 0.0)
        throw Degenerate("interferometer_gate: both path amplitudes vanish");
    const double theta = std::atan2(a, b); // arctan(|A|/|B|) in [0, pi/2]
    InterferometerGate g;
    g.u00 = std::polar(1.0, theta);
    g.u11 = std::polar(1.0, -theta);
    // The flag reports the quadrature condition arg(A) - arg(B) = pi/2
    // (mod 2*pi) within 1e-12 — strictly a statement about the phases,
    // whatever the magnitudes.
    const double rel = wrap_2pi(std::arg(amp_above) - std::arg(amp_below));
    g.qubit_independent = std::abs(rel - 0.5 * pi) < 1e-12;
    return g;
}

} // namespace vgate
