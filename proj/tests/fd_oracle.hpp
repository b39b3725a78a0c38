#pragma once

// Independent cross-check of the charge-basis spectra: the same two-island
// circuit discretized on the phase torus instead. A 4th-order twisted-link
// finite-difference stencil represents E_C (-i d/dphi - A)^2 exactly up to
// O(h^4), with the gate charge entering as a constant vector potential on
// the links (so non-integer offsets need no non-periodic gauge factor). The
// kinetic term is circulant per axis, which gives a cheap FFT preconditioner.
//
// This file deliberately shares no discretization code with the library:
// the product code diagonalizes in the charge basis, this oracle works in
// the conjugate basis, and the two must meet at the spectrum.

#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "vgate/fft.hpp"
#include "vgate/lanczos.hpp"
#include "vgate/params.hpp"

namespace fdtest {

/// f(x) = (30 - 32 cos x + 2 cos 2x)/12 = x^2 + O(x^6), periodic symbol of
/// the 4th-order stencil below.
inline double stencil_symbol(double x) {
    return (30.0 - 32.0 * std::cos(x) + 2.0 * std::cos(2.0 * x)) / 12.0;
}

struct PhiGridOracle {
    std::size_t m = 0;   ///< points per axis (power of two)
    double h = 0.0;      ///< grid spacing 2*pi/m
    double e_c = 0.0;
    double a1 = 0.0, a2 = 0.0; ///< vector potentials (gate charges)
    std::vector<double> v;     ///< potential on the grid, row-major i1*m+i2
    std::vector<double> kin1, kin2; ///< FFT symbols of the twisted stencils
    // Link phases exp(-i * A * l * h) for offsets l = 1, 2 on each axis.
    std::complex<double> tw1[2], tw2[2];

    PhiGridOracle(const vgate::CircuitParams& p, double flux, int q_parity,
                  std::size_t points)
        : m(points), h(2.0 * vgate::pi / static_cast<double>(points)),
          e_c(p.e_c), a1(p.q_gate_1 + 0.5 * q_parity), a2(p.q_gate_2) {
        v.resize(m * m);
        for (std::size_t i1 = 0; i1 < m; ++i1) {
            const double phi1 = h * static_cast<double>(i1);
            for (std::size_t i2 = 0; i2 < m; ++i2) {
                const double phi2 = h * static_cast<double>(i2);
                v[i1 * m + i2] = -p.j1 * std::cos(phi1) -
                                 p.j2 * std::cos(phi2 + flux) -
                                 p.j3 * std::cos(phi1 - phi2);
            }
        }
        kin1.resize(m);
        kin2.resize(m);
        for (std::size_t k = 0; k < m; ++k) {
            kin1[k] = stencil_symbol(h * (static_cast<double>(k) - a1)) / (h * h);
            kin2[k] = stencil_symbol(h * (static_cast<double>(k) - a2)) / (h * h);
        }
        for (int l = 1; l <= 2; ++l) {
            tw1[l - 1] = std::polar(1.0, -a1 * l * h);
            tw2[l - 1] = std::polar(1.0, -a2 * l * h);
        }
    }

    /// out = H in, with H = E_C [T(A1) (x) I + I (x) T(A2)] + diag(V).
    void matvec(const vgate::cvec& in, vgate::cvec& out) const {
        const double c0 = 30.0 / 12.0, c1 = -16.0 / 12.0, c2 = 1.0 / 12.0;
        const double inv_h2 = 1.0 / (h * h);
        const std::size_t n = m;
        for (std::size_t i1 = 0; i1 < n; ++i1) {
            const std::size_t up1 = (i1 + 1) % n, up2 = (i1 + 2) % n;
            const std::size_t dn1 = (i1 + n - 1) % n, dn2 = (i1 + n - 2) % n;
            for (std::size_t i2 = 0; i2 < n; ++i2) {
                const std::size_t k = i1 * n + i2;
                const std::size_t jup1 = (i2 + 1) % n, jup2 = (i2 + 2) % n;
                const std::size_t jdn1 = (i2 + n - 1) % n,
                                  jdn2 = (i2 + n - 2) % n;
                std::complex<double> acc = v[k] * in[k] +
                                           e_c * inv_h2 * 2.0 * c0 * in[k];
                acc += e_c * inv_h2 * c1 *
                       (tw1[0] * in[up1 * n + i2] +
                        std::conj(tw1[0]) * in[dn1 * n + i2] +
                        tw2[0] * in[i1 * n + jup1] +
                        std::conj(tw2[0]) * in[i1 * n + jdn1]);
                acc += e_c * inv_h2 * c2 *
                       (tw1[1] * in[up2 * n + i2] +
                        std::conj(tw1[1]) * in[dn2 * n + i2] +
                        tw2[1] * in[i1 * n + jup2] +
                        std::conj(tw2[1]) * in[i1 * n + jdn2]);
                out[k] = acc;
            }
        }
    }

    /// out = (E_C T + 1)^{-1} in via the 2D FFT (kinetic-only inverse).
    void precond(const vgate::cvec& in, vgate::cvec& out) const {
        out = in;
        vgate::fft2_pow2(out, m, m, false);
        for (std::size_t k1 = 0; k1 < m; ++k1)
            for (std::size_t k2 = 0; k2 < m; ++k2)
                out[k1 * m + k2] /= e_c * (kin1[k1] + kin2[k2]) + 1.0;
        vgate::fft2_pow2(out, m, m, true);
    }

    /// Lowest `block` eigenvalues (ascending).
    vgate::EigResult solve(int block, double tol = 1e-10,
                           int max_iter = 2000) const {
        vgate::LobpcgOptions opt;
        opt.block = block;
        opt.tol = tol;
        opt.max_iter = max_iter;
        return vgate::lobpcg_lowest(
            m * m, [this](const vgate::cvec& in, vgate::cvec& out) { matvec(in, out); },
            [this](const vgate::cvec& in, vgate::cvec& out) { precond(in, out); },
            {}, opt);
    }
};

} // namespace fdtest
