#include "vgate/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>

#include "vgate/errors.hpp"
#include "vgate/parallel.hpp"
#include "vgate/rng.hpp"

namespace vgate {

namespace {

cxd polar_unit(double angle) { return cxd(std::cos(angle), std::sin(angle)); }

} // namespace

ChargeHamiltonian build_hamiltonian(const CircuitParams& params, double flux,
                                    int q_parity, const ChargeBasisSpec& spec,
                                    FluxGauge gauge) {
    spec.validate();
    if (q_parity != 0 && q_parity != 1)
        throw ConfigError("build_hamiltonian: q_parity must be 0 or 1");
    ChargeHamiltonian h;
    h.params = params;
    h.spec = spec;
    h.gauge = gauge;
    h.flux = flux;
    h.q_parity = q_parity;
    h.side = spec.side();
    h.dim = static_cast<std::size_t>(spec.dim());

    const double q1_eff = params.q_gate_1 + 0.5 * static_cast<double>(q_parity);
    const double q2 = params.q_gate_2;
    const int nc = spec.n_cutoff;
    h.diag.resize(h.dim);
    for (int i1 = 0; i1 < h.side; ++i1) {
        const double d1 = static_cast<double>(i1 - nc) - q1_eff;
        for (int i2 = 0; i2 < h.side; ++i2) {
            const double d2 = static_cast<double>(i2 - nc) - q2;
            h.diag[static_cast<std::size_t>(i1) * h.side + i2] =
                params.e_c * (d1 * d1 + d2 * d2);
        }
    }

    // Wrap before the phase factor: H(2*pi) == H(0) bitwise.
    const double f = wrap_pi(flux);
    h.hop1 = cxd(-0.5 * params.j1, 0.0);
    h.hop2 = cxd(-0.5 * params.j2, 0.0);
    h.hop3 = cxd(-0.5 * params.j3, 0.0);
    switch (gauge) {
        case FluxGauge::on_j1: h.hop1 *= polar_unit(f); break;
        case FluxGauge::on_j2: h.hop2 *= polar_unit(-f); break;
        case FluxGauge::on_j3: h.hop3 *= polar_unit(-f); break;
    }
    return h;
}

void ChargeHamiltonian::apply(const cvec& in, cvec& out, int n_threads) const {
    const int m = side;
    const cxd h1 = hop1, h2 = hop2, h3 = hop3;
    const cxd h1c = std::conj(h1), h2c = std::conj(h2), h3c = std::conj(h3);
    const double* dg = diag.data();
    const cxd* x = in.data();
    cxd* y = out.data();
    parallel_for(dim, n_threads, [&](std::size_t k) {
        const int i1 = static_cast<int>(k) / m;
        const int i2 = static_cast<int>(k) % m;
        cxd acc = dg[k] * x[k];
        if (i1 > 0) acc += h1 * x[k - static_cast<std::size_t>(m)];
        if (i1 + 1 < m) acc += h1c * x[k + static_cast<std::size_t>(m)];
        if (i2 > 0) acc += h2 * x[k - 1];
        if (i2 + 1 < m) acc += h2c * x[k + 1];
        if (i1 > 0 && i2 + 1 < m) acc += h3 * x[k - static_cast<std::size_t>(m) + 1];
        if (i1 + 1 < m && i2 > 0) acc += h3c * x[k + static_cast<std::size_t>(m) - 1];
        y[k] = acc;
    });
}

std::vector<cxd> ChargeHamiltonian::dense() const {
    std::vector<cxd> a(dim * dim, cxd(0.0, 0.0));
    cvec unit(dim, cxd(0.0, 0.0)), col(dim);
    for (std::size_t c = 0; c < dim; ++c) {
        unit[c] = cxd(1.0, 0.0);
        apply(unit, col, 1);
        unit[c] = cxd(0.0, 0.0);
        std::copy(col.begin(), col.end(), a.begin() + static_cast<std::ptrdiff_t>(c * dim));
    }
    return a;
}

double ChargeHamiltonian::scale_hint() const {
    double dmax = 0.0;
    for (double d : diag) dmax = std::max(dmax, std::abs(d));
    return dmax + params.j1 + params.j2 + params.j3;
}

namespace {

/// Jacobi-style preconditioner on the charging diagonal with a spectral
/// floor: w_k = r_k / (diag_k - sigma), sigma chosen strictly below the
/// ground energy so the denominator stays positive.
struct DiagPrecond {
    std::vector<double> denom;
    explicit DiagPrecond(const ChargeHamiltonian& h) {
        const double sumj = h.params.j1 + h.params.j2 + h.params.j3;
        const double unit =
            std::max({0.5 * h.params.j(), 0.5 * h.params.e_c, 1e-12});
        double dmin = h.diag.empty() ? 0.0 : h.diag[0];
        for (double d : h.diag) dmin = std::min(dmin, d);
        const double sigma = dmin - sumj - unit;
        denom.resize(h.diag.size());
        for (std::size_t k = 0; k < h.diag.size(); ++k)
            denom[k] = h.diag[k] - sigma;
    }
    void operator()(const cvec& in, cvec& out) const {
        for (std::size_t k = 0; k < in.size(); ++k) out[k] = in[k] / denom[k];
    }
};

/// Deterministic cold-start block: unit vectors at the two lowest charging
/// diagonal entries plus a dash of seeded noise (keeps the start generic when
/// the hopping dominates).
std::vector<cvec> cold_start_block(const ChargeHamiltonian& h,
                                   std::uint64_t seed) {
    std::size_t k0 = 0, k1 = (h.dim > 1) ? 1 : 0;
    for (std::size_t k = 1; k < h.dim; ++k)
        if (h.diag[k] < h.diag[k0]) k0 = k;
    if (k1 == k0) k1 = (k0 == 0) ? 1 : 0;
    for (std::size_t k = 0; k < h.dim; ++k)
        if (k != k0 && h.diag[k] < h.diag[k1]) k1 = k;
    std::vector<cvec> x;
    for (int b = 0; b < 2; ++b) {
        cvec v = seeded_unit_vector(h.dim, subseed(seed, 17 + b));
        vscale(cxd(0.02, 0.0), v);
        v[b == 0 ? k0 : k1] += cxd(1.0, 0.0);
        const double nr = vnorm(v);
        vscale(cxd(1.0 / nr, 0.0), v);
        x.push_back(std::move(v));
    }
    return x;
}

struct PointSolve {
    double e0 = 0.0, e1 = 0.0;
    cvec ground, excited;
};

PointSolve solve_point(const ChargeHamiltonian& h, const std::vector<cvec>& x0,
                       std::uint64_t cold_seed, const SolveOptions& opt,
                       int matvec_threads) {
    LobpcgOptions lo;
    lo.block = 2;
    lo.max_iter = opt.max_iter;
    lo.tol = opt.tol;
    lo.scale_hint = h.scale_hint();
    lo.seed = cold_seed;
    DiagPrecond pre(h);
    auto mv = [&](const cvec& in, cvec& out) { h.apply(in, out, matvec_threads); };
    auto pc = [&](const cvec& in, cvec& out) { pre(in, out); };
    std::vector<cvec> start = x0;
    if (start.empty()) start = cold_start_block(h, cold_seed);
    EigResult r = lobpcg_lowest(h.dim, mv, pc, start, lo);
    PointSolve out;
    out.e0 = r.values[0];
    out.e1 = r.values[1];
    out.ground = std::move(r.vectors[0]);
    out.excited = std::move(r.vectors[1]);
    return out;
}

/// Solve the lowest two states at every grid point. The grid is cut into
/// fixed chunks of opt.chunk points; each chunk starts cold and warm-starts
/// forward, so results are bitwise-independent of the thread count.
std::vector<PointSolve> sweep_ground(const CircuitParams& params, int q_parity,
                                     const ChargeBasisSpec& spec, FluxGauge gauge,
                                     const std::vector<double>& grid,
                                     const SolveOptions& opt) {
    const std::size_t g = grid.size();
    std::vector<PointSolve> out(g);
    const std::size_t chunk = static_cast<std::size_t>(std::max(opt.chunk, 1));
    const std::size_t n_chunks = (g + chunk - 1) / chunk;
    std::vector<std::string> errors(n_chunks);
    parallel_for(n_chunks, opt.n_threads, [&](std::size_t c) {
        try {
            std::vector<cvec> warm;
            const std::size_t hi = std::min(g, (c + 1) * chunk);
            for (std::size_t i = c * chunk; i < hi; ++i) {
                ChargeHamiltonian h =
                    build_hamiltonian(params, grid[i], q_parity, spec, gauge);
                PointSolve ps = solve_point(h, warm, subseed(opt.seed, c), opt,
                                            /*matvec_threads=*/1);
                warm = {ps.ground, ps.excited};
                out[i] = std::move(ps);
            }
        } catch (const std::exception& e) {
            errors[c] = e.what();
        }
    });
    for (const std::string& e : errors)
        if (!e.empty()) throw SolverFailure("flux sweep: " + e);
    return out;
}

} // namespace

SpectralSnapshot ground_snapshot(const ChargeHamiltonian& h,
                                 const SolveOptions& opt) {
    PointSolve ps =
        solve_point(h, {}, subseed(opt.seed, 0xABCDull), opt, opt.n_threads);
    SpectralSnapshot s;
    s.flux = h.flux;
    s.ground_energy = ps.e0;
    s.first_gap = ps.e1 - ps.e0;
    s.ground_state = std::move(ps.ground);
    s.degenerate_ground = s.first_gap < 1e-13 * h.params.j();
    // Global-phase convention: largest-magnitude component real-positive
    // (first index attaining the maximum).
    std::size_t kmax = 0;
    double amax = -1.0;
    for (std::size_t k = 0; k < s.ground_state.size(); ++k) {
        const double a = std::abs(s.ground_state[k]);
        if (a > amax) {
            amax = a;
            kmax = k;
        }
    }
    if (amax > 0.0) {
        const cxd rot = std::conj(s.ground_state[kmax]) / amax;
        vscale(rot, s.ground_state);
    }
    return s;
}

BerryPhaseResult berry_phase(const CircuitParams& params, int q_parity,
                             const SweepConfig& sweep,
                             const ChargeBasisSpec& spec, FluxGauge gauge,
                             const SolveOptions& opt) {
    sweep.validate();
    const std::vector<double> grid = sweep.grid();
    const std::vector<PointSolve> pts =
        sweep_ground(params, q_parity, spec, gauge, grid, opt);

    BerryPhaseResult r;
    r.n_steps = static_cast<int>(grid.size());
    r.grid = grid;
    r.energies.reserve(grid.size());
    r.gaps.reserve(grid.size());
    for (const PointSolve& p : pts) {
        r.energies.push_back(p.e0);
        r.gaps.push_back(p.e1 - p.e0);
    }

    cxd prod(1.0, 0.0);
    double minov = 1.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const std::size_t j = (i + 1 == pts.size()) ? 0 : i + 1;
        const cxd ov = vdot(pts[i].ground, pts[j].ground);
        const double mag = std::abs(ov);
        minov = std::min(minov, mag);
        if (mag < 0.5)
            throw OverlapCollapse(
                "berry_phase: step overlap " + std::to_string(mag) +
                " at flux " + std::to_string(grid[i]) +
                "; refine the sweep grid near the gap minimum");
        prod *= ov / mag;
    }
    r.phase = wrap_pi(std::arg(prod));
    r.min_overlap = minov;
    return r;
}

QubitPhaseReport qubit_phase_report(const CircuitParams& params,
                                    const SweepConfig& sweep,
                                    const ChargeBasisSpec& spec,
                                    FluxGauge gauge, const SolveOptions& opt) {
    QubitPhaseReport rep;
    rep.berry_q0 = berry_phase(params, 0, sweep, spec, gauge, opt);
    rep.berry_q1 = berry_phase(params, 1, sweep, spec, gauge, opt);
    rep.phase = wrap_pi(rep.berry_q1.phase - rep.berry_q0.phase);
    rep.min_overlap = std::min(rep.berry_q0.min_overlap, rep.berry_q1.min_overlap);
    return rep;
}

double qubit_phase(const CircuitParams& params, const SweepConfig& sweep,
                   const ChargeBasisSpec& spec, FluxGauge gauge,
                   const SolveOptions& opt) {
    return qubit_phase_report(params, sweep, spec, gauge, opt).phase;
}

std::vector<SplittingPoint> qubit_splitting_profile(
    const CircuitParams& params, const SweepConfig& sweep,
    const ChargeBasisSpec& spec, FluxGauge gauge, const SolveOptions& opt) {
    sweep.validate();
    const std::vector<double> grid = sweep.grid();
    const std::vector<PointSolve> q0 =
        sweep_ground(params, 0, spec, gauge, grid, opt);
    const std::vector<PointSolve> q1 =
        sweep_ground(params, 1, spec, gauge, grid, opt);
    std::vector<SplittingPoint> rows(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        rows[i].flux = grid[i];
        rows[i].e0_q0 = q0[i].e0;
        rows[i].e0_q1 = q1[i].e0;
        rows[i].gap_q0 = q0[i].e1 - q0[i].e0;
        rows[i].gap_q1 = q1[i].e1 - q1[i].e0;
        rows[i].splitting = q1[i].e0 - q0[i].e0;
    }
    return rows;
}

DynamicalRange dynamical_range_from_profile(
    const std::vector<SplittingPoint>& profile, double j_unit) {
    if (profile.empty()) throw ConfigError("dynamical_range: empty profile");
    DynamicalRange dr;
    dr.min_gap = std::min(profile[0].gap_q0, profile[0].gap_q1);
    dr.max_splitting = 0.0;
    for (const SplittingPoint& p : profile) {
        dr.min_gap = std::min({dr.min_gap, p.gap_q0, p.gap_q1});
        dr.max_splitting = std::max(dr.max_splitting, std::abs(p.splitting));
    }
    if (dr.max_splitting < 1e-15 * j_unit) {
        dr.infinite_range = true;
        dr.zeta = 1e15;
    } else {
        dr.zeta = dr.min_gap / dr.max_splitting;
    }
    return dr;
}

DynamicalRange dynamical_range(const CircuitParams& params,
                               const SweepConfig& sweep,
                               const ChargeBasisSpec& spec, FluxGauge gauge,
                               const SolveOptions& opt) {
    return dynamical_range_from_profile(
        qubit_splitting_profile(params, sweep, spec, gauge, opt), params.j());
}

double dynamical_phase_from_profile(const std::vector<SplittingPoint>& profile,
                                    double sweep_rate) {
    if (!(sweep_rate > 0.0))
        throw ConfigError("dynamical_phase: sweep_rate must be positive");
    if (profile.size() < 2)
        throw ConfigError("dynamical_phase: need at least two grid points");
    double integral = 0.0;
    const std::size_t g = profile.size();
    for (std::size_t i = 0; i < g; ++i) {
        const std::size_t j = (i + 1 == g) ? 0 : i + 1;
        const double df = (i + 1 == g)
                              ? (2.0 * pi + profile[0].flux - profile[i].flux)
                              : (profile[j].flux - profile[i].flux);
        integral += 0.5 * (profile[i].splitting + profile[j].splitting) * df;
    }
    return integral / sweep_rate;
}

double dynamical_phase(const CircuitParams& params, double sweep_rate,
                       const SweepConfig& sweep, const ChargeBasisSpec& spec,
                       FluxGauge gauge, const SolveOptions& opt) {
    return dynamical_phase_from_profile(
        qubit_splitting_profile(params, sweep, spec, gauge, opt), sweep_rate);
}

std::vector<PhaseSweepRow> phase_vs_epsilon_sweep(
    const CircuitParams& params_template, const std::vector<double>& epsilon_grid,
    const SweepConfig& sweep, const ChargeBasisSpec& spec, FluxGauge gauge,
    const SolveOptions& opt) {
    for (double e : epsilon_grid)
        if (!(e >= 0.0) || !(e <= 0.15))
            throw ConfigError("phase_vs_epsilon_sweep: epsilon grid must lie in "
                              "[0, 0.15]");
    const double j = params_template.j();
    std::vector<PhaseSweepRow> rows;
    rows.reserve(epsilon_grid.size());
    for (double e : epsilon_grid) {
        CircuitParams p = params_template;
        p.j1 = (1.0 + e) * j;
        p.j2 = (1.0 - e) * j;
        const QubitPhaseReport rep =
            qubit_phase_report(p, sweep, spec, gauge, opt);
        rows.push_back({e, rep.phase, rep.min_overlap});
    }
    return rows;
}

} // namespace vgate
