// Benchmark of the OpenMP-parallel kernels against the serial reference
// paths (n_threads <= 1). Besides timing, every kernel's parallel result is
// checked for bitwise equality with the serial one -- the library's
// determinism contract -- and any mismatch fails the run.

#include <chrono>
#include <cstdio>
#include <cstring>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"

#include "vgate/params.hpp"
#include "vgate/potential.hpp"
#include "vgate/rng.hpp"
#include "vgate/spectral.hpp"

namespace {

double now_ms() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double, std::milli>(
               clock::now().time_since_epoch())
        .count();
}

struct Row {
    std::string name;
    double serial_ms = 0.0;
    double parallel_ms = 0.0;
    bool bitwise_equal = false;
};

bool equal_bits(const std::vector<double>& a, const std::vector<double>& b) {
    return a.size() == b.size() &&
           (a.empty() ||
            std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0);
}

bool equal_bits(const vgate::cvec& a, const vgate::cvec& b) {
    return a.size() == b.size() &&
           (a.empty() ||
            std::memcmp(a.data(), b.data(), a.size() * sizeof(vgate::cxd)) == 0);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"vgate benchmark: serial reference vs OpenMP kernels"};
    int threads = static_cast<int>(std::thread::hardware_concurrency());
    if (threads < 2) threads = 2;
    int n_cutoff = 24;
    int reps = 40;
    int slice_points = 512;
    app.add_option("--threads", threads, "parallel thread count");
    app.add_option("--cutoff", n_cutoff, "charge cutoff for the matvec bench");
    app.add_option("--reps", reps, "matvec repetitions");
    app.add_option("--slice-points", slice_points, "landscape grid size");
    CLI11_PARSE(app, argc, argv);

    std::vector<Row> rows;
    const vgate::CircuitParams p =
        vgate::CircuitParams::from_asymmetry(0.1, 2.0, 0.4, 0.25, 0.0);

    { // Hamiltonian matvec
        vgate::ChargeBasisSpec spec;
        spec.n_cutoff = n_cutoff;
        const vgate::ChargeHamiltonian h =
            vgate::build_hamiltonian(p, 1.0, 0, spec);
        vgate::cvec x(h.dim), serial(h.dim), parallel(h.dim);
        std::mt19937_64 rng = vgate::seeded_engine(7);
        for (auto& v : x)
            v = vgate::cxd(static_cast<double>(rng() >> 11) * 0x1p-53,
                           static_cast<double>(rng() >> 11) * 0x1p-53);
        Row r;
        r.name = "matvec dim=" + std::to_string(h.dim) + " x" +
                 std::to_string(reps);
        double t0 = now_ms();
        for (int i = 0; i < reps; ++i) h.apply(x, serial, 1);
        r.serial_ms = now_ms() - t0;
        t0 = now_ms();
        for (int i = 0; i < reps; ++i) h.apply(x, parallel, threads);
        r.parallel_ms = now_ms() - t0;
        r.bitwise_equal = equal_bits(serial, parallel);
        rows.push_back(r);
    }

    { // landscape slice
        const auto grid = vgate::default_delta_phi_grid(slice_points);
        Row r;
        r.name = "landscape_slice n=" + std::to_string(slice_points);
        double t0 = now_ms();
        const auto serial = vgate::landscape_slice(p, vgate::pi, grid, 256, 1);
        r.serial_ms = now_ms() - t0;
        t0 = now_ms();
        const auto parallel =
            vgate::landscape_slice(p, vgate::pi, grid, 256, threads);
        r.parallel_ms = now_ms() - t0;
        std::vector<double> a, b;
        for (const auto& [x, y] : serial) {
            a.push_back(x);
            a.push_back(y);
        }
        for (const auto& [x, y] : parallel) {
            b.push_back(x);
            b.push_back(y);
        }
        r.bitwise_equal = equal_bits(a, b);
        rows.push_back(r);
    }

    { // full spectral sweep (both parity sectors)
        vgate::ChargeBasisSpec spec;
        spec.n_cutoff = 6;
        vgate::SweepConfig sweep;
        sweep.n_uniform = 64;
        sweep.refine = false;
        vgate::SolveOptions opt;
        Row r;
        r.name = "splitting_profile nc=6 n=64";
        opt.n_threads = 1;
        double t0 = now_ms();
        const auto serial =
            vgate::qubit_splitting_profile(p, sweep, spec,
                                           vgate::FluxGauge::on_j2, opt);
        r.serial_ms = now_ms() - t0;
        opt.n_threads = threads;
        t0 = now_ms();
        const auto parallel =
            vgate::qubit_splitting_profile(p, sweep, spec,
                                           vgate::FluxGauge::on_j2, opt);
        r.parallel_ms = now_ms() - t0;
        std::vector<double> a, b;
        for (const auto& s : serial) {
            a.insert(a.end(), {s.flux, s.e0_q0, s.e0_q1, s.gap_q0, s.gap_q1,
                               s.splitting});
        }
        for (const auto& s : parallel) {
            b.insert(b.end(), {s.flux, s.e0_q0, s.e0_q1, s.gap_q0, s.gap_q1,
                               s.splitting});
        }
        r.bitwise_equal = equal_bits(a, b);
        rows.push_back(r);
    }

    std::printf("%-34s %12s %12s %9s %8s\n", "kernel", "serial(ms)",
                "omp(ms)", "speedup", "bitwise");
    bool all_equal = true;
    for (const auto& r : rows) {
        const double speedup =
            r.parallel_ms > 0.0 ? r.serial_ms / r.parallel_ms : 0.0;
        std::printf("%-34s %12.2f %12.2f %8.2fx %8s\n", r.name.c_str(),
                    r.serial_ms, r.parallel_ms, speedup,
                    r.bitwise_equal ? "ok" : "MISMATCH");
        all_equal = all_equal && r.bitwise_equal;
    }
    std::printf("threads=%d  all kernels bitwise-identical: %s\n", threads,
                all_equal ? "yes" : "NO");
    return all_equal ? 0 : 1;
}
