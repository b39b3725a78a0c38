#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>
#include <vector>

#include "vgate/params.hpp"
#include "vgate/parallel.hpp"
#include "vgate/potential.hpp"
#include "vgate/spectral.hpp"

using namespace vgate;

// Every kernel here must produce bit-for-bit identical output whether it runs
// on the serial reference path (n_threads <= 1) or the OpenMP path: work is
// split by index, never re-associated.

namespace {

CircuitParams gate_point() {
    return CircuitParams::from_asymmetry(0.05, 2.0, 0.4, 0.25, 0.0);
}

} // namespace

TEST_CASE("parallel_for covers every index exactly once, any thread count") {
    for (int threads : {1, 2, 3, 8}) {
        std::vector<int> hits(1000, 0);
        parallel_for(hits.size(), threads,
                     [&](std::size_t i) { hits[i] += static_cast<int>(i % 7) + 1; });
        for (std::size_t i = 0; i < hits.size(); ++i)
            CHECK(hits[i] == static_cast<int>(i % 7) + 1);
    }
}

TEST_CASE("Hamiltonian matvec: OpenMP path is bitwise equal to the serial "
          "reference") {
    ChargeBasisSpec spec;
    spec.n_cutoff = 9;
    const ChargeHamiltonian h = build_hamiltonian(gate_point(), 1.7, 1, spec);
    std::mt19937_64 rng(11ull);
    cvec x(h.dim);
    for (auto& c : x)
        c = cxd((rng() >> 11) * 0x1.0p-53 - 0.5, (rng() >> 11) * 0x1.0p-53 - 0.5);
    cvec serial(h.dim), parallel(h.dim);
    h.apply(x, serial, 1);
    for (int threads : {2, 4}) {
        h.apply(x, parallel, threads);
        CHECK(serial == parallel);
    }
}

TEST_CASE("landscape slice: identical doubles from serial and threaded runs") {
    const auto grid = default_delta_phi_grid(257);
    const auto serial = landscape_slice(gate_point(), pi, grid, 128, 1);
    const auto threaded = landscape_slice(gate_point(), pi, grid, 128, 4);
    REQUIRE(serial.size() == threaded.size());
    for (std::size_t i = 0; i < serial.size(); ++i) {
        CHECK(serial[i].first == threaded[i].first);
        CHECK(serial[i].second == threaded[i].second);
    }
}

TEST_CASE("potential minimization: identical reports from serial and "
          "threaded runs") {
    const auto serial = minimize_potential(gate_point(), pi, 128, 1);
    const auto threaded = minimize_potential(gate_point(), pi, 128, 3);
    REQUIRE(serial.size() == threaded.size());
    for (std::size_t i = 0; i < serial.size(); ++i) {
        CHECK(serial[i].phi1 == threaded[i].phi1);
        CHECK(serial[i].phi2 == threaded[i].phi2);
        CHECK(serial[i].v_min_numeric == threaded[i].v_min_numeric);
        CHECK(serial[i].delta_phi == threaded[i].delta_phi);
    }
}

TEST_CASE("Berry sweep: identical phase, energies, and overlaps from serial "
          "and threaded runs") {
    ChargeBasisSpec spec;
    spec.n_cutoff = 5;
    SweepConfig sweep;
    sweep.n_uniform = 96;
    sweep.refine = false;
    SolveOptions serial_opt, threaded_opt;
    serial_opt.n_threads = 1;
    threaded_opt.n_threads = 4;
    const BerryPhaseResult a =
        berry_phase(gate_point(), 0, sweep, spec, FluxGauge::on_j2, serial_opt);
    const BerryPhaseResult b =
        berry_phase(gate_point(), 0, sweep, spec, FluxGauge::on_j2, threaded_opt);
    CHECK(a.phase == b.phase);
    CHECK(a.min_overlap == b.min_overlap);
    CHECK(a.grid == b.grid);
    CHECK(a.energies == b.energies);
    CHECK(a.gaps == b.gaps);
}

TEST_CASE("splitting profile: identical outputs from serial and threaded "
          "runs") {
    ChargeBasisSpec spec;
    spec.n_cutoff = 5;
    SweepConfig sweep;
    sweep.n_uniform = 48;
    sweep.refine = false;
    SolveOptions serial_opt, threaded_opt;
    serial_opt.n_threads = 1;
    threaded_opt.n_threads = 4;
    const auto a = qubit_splitting_profile(gate_point(), sweep, spec,
                                           FluxGauge::on_j2, serial_opt);
    const auto b = qubit_splitting_profile(gate_point(), sweep, spec,
                                           FluxGauge::on_j2, threaded_opt);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].flux == b[i].flux);
        CHECK(a[i].e0_q0 == b[i].e0_q0);
        CHECK(a[i].e0_q1 == b[i].e0_q1);
        CHECK(a[i].gap_q0 == b[i].gap_q0);
        CHECK(a[i].gap_q1 == b[i].gap_q1);
        CHECK(a[i].splitting == b[i].splitting);
    }
}
