#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "vgate/errors.hpp"

namespace vgate {

inline constexpr double pi = std::numbers::pi;

/// Wrap an angle to the principal interval (-pi, pi].
inline double wrap_pi(double x) {
    double y = std::remainder(x, 2.0 * pi);
    if (y <= -pi) y += 2.0 * pi;
    return y;
}

/// Wrap an angle to [0, 2*pi).
inline double wrap_2pi(double x) {
    double y = std::fmod(x, 2.0 * pi);
    if (y < 0.0) y += 2.0 * pi;
    if (y >= 2.0 * pi) y = 0.0;
    return y;
}

/// Full parameter set of the two-island circuit.
///
/// Units: all energies in J = (j1+j2)/2 (the mean weak-junction Josephson
/// energy); gate charges in Cooper-pair units (2e); capacitance combinations
/// c_bar = C1+C2-2*C3, c_tilde = C1-C2, c_delta = C1+C2+2*C3 dimensionless
/// relative to 2e^2/E_C. q_parity is the fermion parity of the Majorana-wire
/// island and enters the Hamiltonian as a half-Cooper-pair shift of q_gate_1.
struct CircuitParams {
    double j1 = 1.0;
    double j2 = 1.0;
    double j3 = 2.0;
    double e_c = 0.4;
    double q_gate_1 = 0.125;
    double q_gate_2 = 0.125;
    double c_bar = 2.0;
    double c_tilde = 0.0;
    double c_delta = 2.0;
    int q_parity = 0;

    /// Mean Josephson energy J = (j1+j2)/2; the energy unit of the library.
    double j() const { return 0.5 * (j1 + j2); }
    /// Junction asymmetry epsilon = (j1-j2)/(j1+j2).
    double epsilon() const { return (j1 - j2) / (j1 + j2); }
    /// Strong-junction ratio alpha = j3/J.
    double alpha() const { return j3 / j(); }

    /// Convenience constructor from the (epsilon, alpha) parametrization:
    /// j1 = (1+eps)J, j2 = (1-eps)J, j3 = alpha*J with J = 1.
    static CircuitParams from_asymmetry(double eps, double alpha, double e_c,
                                        double q_plus, double q_minus = 0.0) {
        CircuitParams p;
        p.j1 = 1.0 + eps;
        p.j2 = 1.0 - eps;
        p.j3 = alpha;
        p.e_c = e_c;
        p.q_gate_1 = 0.5 * (q_plus + q_minus);
        p.q_gate_2 = 0.5 * (q_plus - q_minus);
        return p;
    }

    /// Enforce the type invariants; throws ConfigError with a description.
    void validate() const {
        if (!(j1 > 0.0) || !(j2 > 0.0) || !(j3 > 0.0))
            throw ConfigError("Josephson energies j1, j2, j3 must be positive");
        if (!(e_c > 0.0))
            throw ConfigError("charging energy e_c must be positive");
        const double eps = epsilon();
        if (!(eps >= 0.0) || !(eps < 1.0))
            throw ConfigError("junction asymmetry must satisfy 0 <= epsilon < 1 (j1 >= j2 > 0)");
        if (!(c_bar > 0.0) || !(c_delta > 0.0))
            throw ConfigError("capacitance matrix must be positive definite (c_bar, c_delta > 0)");
        if (q_parity != 0 && q_parity != 1)
            throw ConfigError("q_parity must be 0 or 1");
    }
};

/// Charge-basis truncation: n_j ranges over [-n_cutoff, n_cutoff] per island.
struct ChargeBasisSpec {
    int n_cutoff = 15;

    int side() const { return 2 * n_cutoff + 1; }
    int dim() const { return side() * side(); }

    void validate() const {
        if (dim() < 9) throw ConfigError("charge basis dimension must be at least 9 (n_cutoff >= 1)");
    }
};

/// Adiabatic flux-loop grid: n_uniform points uniform on [0, 2*pi), plus an
/// optional refinement window (extra points) centered where the gap is
/// smallest, by default at flux = pi. The loop is closed by reusing the
/// flux = 0 eigenvector as the 2*pi endpoint.
struct SweepConfig {
    int n_uniform = 256;
    bool refine = true;
    int n_refine = 128;
    double refine_center = pi;
    double refine_width = 0.4;

    void validate() const {
        if (n_uniform < 16) throw ConfigError("flux sweep needs at least 16 steps");
        if (refine && n_refine < 2) throw ConfigError("refinement window needs at least 2 points");
    }

    /// Merged, sorted, deduplicated flux grid in [0, 2*pi).
    std::vector<double> grid() const {
        std::vector<double> g;
        g.reserve(static_cast<std::size_t>(n_uniform) + (refine ? n_refine : 0));
        for (int i = 0; i < n_uniform; ++i)
            g.push_back(2.0 * pi * static_cast<double>(i) / static_cast<double>(n_uniform));
        if (refine) {
            for (int i = 0; i < n_refine; ++i) {
                double f = refine_center - 0.5 * refine_width
                         + refine_width * static_cast<double>(i) / static_cast<double>(n_refine - 1);
                if (f >= 0.0 && f < 2.0 * pi) g.push_back(f);
            }
            std::sort(g.begin(), g.end());
            g.erase(std::unique(g.begin(), g.end(),
                                [](double a, double b) { return std::abs(a - b) < 1e-12; }),
                    g.end());
        }
        return g;
    }
};

/// Which junction's hopping term carries the e^{i*flux} factor. All three
/// choices are 2*pi-periodic gauges of the same spectrum; closed-loop Berry
/// phases agree across them.
enum class FluxGauge { on_j1, on_j2, on_j3 };

} // namespace vgate
