#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "fd_oracle.hpp"
#include "vgate/params.hpp"
#include "vgate/spectral.hpp"

using namespace vgate;

namespace {

struct LowTwo {
    double e0, e1;
};

LowTwo charge_basis_low2(const CircuitParams& p, double flux, int q_parity,
                         int n_cutoff) {
    ChargeBasisSpec spec;
    spec.n_cutoff = n_cutoff;
    const SpectralSnapshot s = ground_snapshot(build_hamiltonian(p, flux, q_parity, spec));
    return {s.ground_energy, s.ground_energy + s.first_gap};
}

LowTwo oracle_low2(const CircuitParams& p, double flux, int q_parity,
                   std::size_t m) {
    const fdtest::PhiGridOracle oracle(p, flux, q_parity, m);
    const EigResult r = oracle.solve(2);
    REQUIRE(r.converged);
    return {r.values[0], r.values[1]};
}

} // namespace

TEST_CASE("stencil symbol is an O(h^4)-accurate square") {
    CHECK(fdtest::stencil_symbol(0.0) == 0.0);
    CHECK(fdtest::stencil_symbol(0.1) ==
          doctest::Approx(0.01).epsilon(2e-7));
    CHECK(fdtest::stencil_symbol(0.02) ==
          doctest::Approx(4e-4).epsilon(1e-9));
    // Symmetric and positive away from zero.
    CHECK(fdtest::stencil_symbol(0.7) == fdtest::stencil_symbol(-0.7));
    CHECK(fdtest::stencil_symbol(2.0) > 0.0);
}

TEST_CASE("phase-torus oracle agrees with the charge basis at the gate "
          "point, both parities") {
    const CircuitParams p = CircuitParams::from_asymmetry(0.05, 2.0, 0.4, 0.25, 0.0);
    for (int q : {0, 1}) {
        CAPTURE(q);
        const LowTwo cb = charge_basis_low2(p, 1.1, q, 15);
        const LowTwo fd = oracle_low2(p, 1.1, q, 256);
        CHECK(std::abs(fd.e0 - cb.e0) < 1e-6);
        CHECK(std::abs(fd.e1 - cb.e1) < 1e-6);
    }
}

TEST_CASE("oracle discretization error falls like h^4") {
    const CircuitParams p = CircuitParams::from_asymmetry(0.1, 2.0, 0.4, 0.3, 0.1);
    const double flux = 2.2;
    const LowTwo truth = charge_basis_low2(p, flux, 0, 15);
    const LowTwo coarse = oracle_low2(p, flux, 0, 64);
    const LowTwo fine = oracle_low2(p, flux, 0, 128);
    const double err_coarse = std::abs(coarse.e0 - truth.e0);
    const double err_fine = std::abs(fine.e0 - truth.e0);
    CAPTURE(err_coarse);
    CAPTURE(err_fine);
    CHECK(err_fine < err_coarse / 6.0); // 4th order predicts a factor 16
    CHECK(err_fine < 5e-6);
}

TEST_CASE("oracle agreement holds across random circuit parameters") {
    std::mt19937_64 rng(20260816ull);
    auto uniform = [&rng](double lo, double hi) {
        return lo + (hi - lo) * ((rng() >> 11) * 0x1.0p-53);
    };
    for (int trial = 0; trial < 3; ++trial) {
        const double eps = uniform(0.0, 0.2);
        const double alpha = uniform(1.2, 2.5);
        const double e_c = uniform(0.2, 0.6);
        const double q_plus = uniform(0.0, 0.5);
        const double q_minus = uniform(-0.2, 0.2);
        const double flux = uniform(0.0, 2.0 * pi);
        const int q = static_cast<int>(rng() & 1u);
        CAPTURE(trial);
        CAPTURE(eps);
        CAPTURE(alpha);
        CAPTURE(e_c);
        CAPTURE(q_plus);
        CAPTURE(q_minus);
        CAPTURE(flux);
        CAPTURE(q);
        const CircuitParams p =
            CircuitParams::from_asymmetry(eps, alpha, e_c, q_plus, q_minus);
        const LowTwo cb = charge_basis_low2(p, flux, q, 15);
        const LowTwo fd = oracle_low2(p, flux, q, 256);
        CHECK(std::abs(fd.e0 - cb.e0) < 1e-6);
        CHECK(std::abs(fd.e1 - cb.e1) < 1e-6);
    }
}
