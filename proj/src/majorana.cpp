#include "vgate/majorana.hpp"

#include <cmath>
#include <stdexcept>

#include "vgate/errors.hpp"
#include "vgate/params.hpp"
#include "vgate/rng.hpp"

namespace vgate {

Mat8 Mat8::identity() {
    Mat8 m;
    for (int i = 0; i < 8; ++i) m(i, i) = cxd(1.0, 0.0);
    return m;
}

Mat8 Mat8::adjoint() const {
    Mat8 m;
    for (int r = 0; r < 8; ++r)
        for (int c = 0; c < 8; ++c) m(r, c) = std::conj((*this)(c, r));
    return m;
}

Mat8 operator*(const Mat8& x, const Mat8& y) {
    Mat8 m;
    for (int r = 0; r < 8; ++r)
        for (int c = 0; c < 8; ++c) {
            cxd s(0.0, 0.0);
            for (int k = 0; k < 8; ++k) s += x(r, k) * y(k, c);
            m(r, c) = s;
        }
    return m;
}

Mat8 operator*(cxd s, const Mat8& x) {
    Mat8 m;
    for (std::size_t i = 0; i < 64; ++i) m.a[i] = s * x.a[i];
    return m;
}

Mat8 operator+(const Mat8& x, const Mat8& y) {
    Mat8 m;
    for (std::size_t i = 0; i < 64; ++i) m.a[i] = x.a[i] + y.a[i];
    return m;
}

Mat8 operator-(const Mat8& x, const Mat8& y) {
    Mat8 m;
    for (std::size_t i = 0; i < 64; ++i) m.a[i] = x.a[i] - y.a[i];
    return m;
}

double max_abs_diff(const Mat8& x, const Mat8& y) {
    double d = 0.0;
    for (std::size_t i = 0; i < 64; ++i)
        d = std::max(d, std::abs(x.a[i] - y.a[i]));
    return d;
}

void apply(const Mat8& m, cvec& v) {
    cvec out(8, cxd(0.0, 0.0));
    for (int r = 0; r < 8; ++r) {
        cxd s(0.0, 0.0);
        for (int c = 0; c < 8; ++c) s += m(r, c) * v[static_cast<std::size_t>(c)];
        out[static_cast<std::size_t>(r)] = s;
    }
    v = std::move(out);
}

namespace {

/// Kronecker product of three 2x2 matrices into a Mat8; mode 1 is the most
/// significant bit of the basis index.
Mat8 kron3(const std::array<cxd, 4>& m1, const std::array<cxd, 4>& m2,
           const std::array<cxd, 4>& m3) {
    Mat8 out;
    for (int r1 = 0; r1 < 2; ++r1)
        for (int c1 = 0; c1 < 2; ++c1)
            for (int r2 = 0; r2 < 2; ++r2)
                for (int c2 = 0; c2 < 2; ++c2)
                    for (int r3 = 0; r3 < 2; ++r3)
                        for (int c3 = 0; c3 < 2; ++c3)
                            out(r1 * 4 + r2 * 2 + r3, c1 * 4 + c2 * 2 + c3) =
                                m1[static_cast<std::size_t>(r1 * 2 + c1)] *
                                m2[static_cast<std::size_t>(r2 * 2 + c2)] *
                                m3[static_cast<std::size_t>(r3 * 2 + c3)];
    return out;
}

const std::array<cxd, 4> kI{cxd(1, 0), cxd(0, 0), cxd(0, 0), cxd(1, 0)};
const std::array<cxd, 4> kX{cxd(0, 0), cxd(1, 0), cxd(1, 0), cxd(0, 0)};
const std::array<cxd, 4> kY{cxd(0, 0), cxd(0, -1), cxd(0, 1), cxd(0, 0)};
const std::array<cxd, 4> kZ{cxd(1, 0), cxd(0, 0), cxd(0, 0), cxd(-1, 0)};

double canonical_u01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1p-53;
}

} // namespace

Mat8 MajoranaAlgebra::bilinear(int a, int b) const {
    if (a < 0 || a > 5 || b < 0 || b > 5 || a == b)
        throw ConfigError("bilinear: need distinct Majorana indices in [0,5]");
    return cxd(0.0, 1.0) *
           (gamma[static_cast<std::size_t>(a)] * gamma[static_cast<std::size_t>(b)]);
}

std::pair<int, int> MajoranaAlgebra::pauli_pair(Qubit q, Axis ax) {
    // Lower qubit: the caption assignment sigma_z = i a1 a2, sigma_y = i a1 a3,
    // sigma_x = i a2 a3. Upper qubit: same x, but Y and Z take the reversed
    // pair order (Sigma_y = i b3 b1, Sigma_z = i b2 b1) — the sign choice under
    // which the forced-measurement Bell state is (|uu> + |dd>)/sqrt(2) in the
    // z/Z basis (<zZ> = +1) and the CHSH combination evaluates to 2. Either
    // sign set satisfies the per-qubit algebra; this one matches the intended
    // correlations.
    if (q == Qubit::lower) {
        switch (ax) {
            case Axis::x: return {1, 2};
            case Axis::y: return {0, 2};
            case Axis::z: return {0, 1};
        }
    } else {
        switch (ax) {
            case Axis::x: return {4, 5};
            case Axis::y: return {5, 3};
            case Axis::z: return {4, 3};
        }
    }
    throw Unreachable("pauli_pair: bad axis");
}

Mat8 MajoranaAlgebra::pauli(Qubit q, Axis ax) const {
    const auto [a, b] = pauli_pair(q, ax);
    return bilinear(a, b);
}

MajoranaAlgebra build_algebra() {
    MajoranaAlgebra alg;
    // Jordan-Wigner strings over modes (1,2,3):
    alg.gamma[0] = kron3(kX, kI, kI); // alpha1 = X1
    alg.gamma[1] = kron3(kY, kI, kI); // alpha2 = Y1
    alg.gamma[2] = kron3(kZ, kX, kI); // alpha3 = Z1 X2
    alg.gamma[3] = kron3(kZ, kY, kI); // beta1  = Z1 Y2
    alg.gamma[4] = kron3(kZ, kZ, kX); // beta2  = Z1 Z2 X3
    alg.gamma[5] = kron3(kZ, kZ, kY); // beta3  = Z1 Z2 Y3
    alg.parity_total = kron3(kZ, kZ, kZ); // prod_j (-i g_{2j-1} g_{2j})
    return alg;
}

MajoranaRegister make_register(const MajoranaAlgebra& alg, int total_parity) {
    if (total_parity != 1 && total_parity != -1)
        throw ConfigError("make_register: total_parity must be +1 or -1");
    MajoranaRegister reg;
    reg.state.assign(8, cxd(0.0, 0.0));
    // |000> has Z1 Z2 Z3 = +1; |100> (index 4) has -1.
    reg.state[total_parity == 1 ? 0 : 4] = cxd(1.0, 0.0);
    reg.total_parity = total_parity;
    (void)alg;
    return reg;
}

MeasurementRecord measure_parity(const MajoranaAlgebra& alg,
                                 MajoranaRegister& reg, int a, int b,
                                 std::optional<int> forced,
                                 std::mt19937_64& rng) {
    if (a == b) throw ConfigError("measure_parity: need a distinct pair");
    const Mat8 op = alg.bilinear(a, b);

    cvec plus = reg.state;
    apply(op, plus);
    // P+- psi = (psi +- op psi)/2.
    cvec proj_plus(8), proj_minus(8);
    for (int k = 0; k < 8; ++k) {
        proj_plus[static_cast<std::size_t>(k)] =
            0.5 * (reg.state[static_cast<std::size_t>(k)] +
                   plus[static_cast<std::size_t>(k)]);
        proj_minus[static_cast<std::size_t>(k)] =
            0.5 * (reg.state[static_cast<std::size_t>(k)] -
                   plus[static_cast<std::size_t>(k)]);
    }
    const double p_plus = vnorm(proj_plus) * vnorm(proj_plus);
    const double p_minus = vnorm(proj_minus) * vnorm(proj_minus);

    int outcome;
    if (forced.has_value()) {
        if (*forced != 1 && *forced != -1)
            throw ConfigError("measure_parity: forced outcome must be +1 or -1");
        outcome = *forced;
        const double p = (outcome == 1) ? p_plus : p_minus;
        if (p < 1e-14)
            throw ImpossibleOutcome(
                "measure_parity: forced outcome has probability " +
                std::to_string(p));
    } else if (p_plus < 1e-300) {
        outcome = -1;
    } else if (p_minus < 1e-300) {
        outcome = +1;
    } else {
        outcome = (canonical_u01(rng) < p_plus) ? +1 : -1;
    }

    cvec& picked = (outcome == 1) ? proj_plus : proj_minus;
    const double nr = vnorm(picked);
    vscale(cxd(1.0 / nr, 0.0), picked);
    reg.state = std::move(picked);

    MeasurementRecord rec;
    rec.outcome = outcome;
    rec.probability = (outcome == 1) ? p_plus : p_minus;
    return rec;
}

void prepare_bell(const MajoranaAlgebra& alg, MajoranaRegister& reg,
                  std::mt19937_64& rng) {
    // Precondition: definite total parity matching the tag.
    {
        cvec pv = reg.state;
        apply(alg.parity_total, pv);
        const cxd expect = vdot(reg.state, pv);
        if (std::abs(expect - cxd(reg.total_parity, 0.0)) > 1e-9)
            throw ConfigError("prepare_bell: register is not in the tagged "
                              "total-parity sector");
    }
    // Targets in order; the second loop's operators (pairs {a2,b2} and
    // {a2,a3}) are disjoint from {a1,b1}, so the first stabilizer survives.
    const int targets[2][2] = {{0, 3}, {1, 4}}; // (alpha1,beta1), (alpha2,beta2)
    const int aux[2][2] = {{0, 2}, {1, 2}};     // (alpha1,alpha3), (alpha2,alpha3)
    for (int t = 0; t < 2; ++t) {
        bool done = false;
        for (int round_i = 0; round_i < 1000; ++round_i) {
            const MeasurementRecord rec = measure_parity(
                alg, reg, targets[t][0], targets[t][1], std::nullopt, rng);
            if (rec.outcome == -1) {
                done = true;
                break;
            }
            measure_parity(alg, reg, aux[t][0], aux[t][1], std::nullopt, rng);
        }
        if (!done)
            throw NonTermination("prepare_bell: forced-measurement loop did "
                                 "not converge in 1000 rounds");
    }
}

void braid(const MajoranaAlgebra& alg, MajoranaRegister& reg, int a, int b,
           int direction) {
    if (direction != 1 && direction != -1)
        throw ConfigError("braid: direction must be +1 or -1");
    // exp(s (pi/4) g_a g_b) = (1 + s g_a g_b)/sqrt(2) since (g_a g_b)^2 = -1.
    const Mat8 gg = alg.gamma[static_cast<std::size_t>(a)] *
                    alg.gamma[static_cast<std::size_t>(b)];
    cvec rot = reg.state;
    apply(gg, rot);
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (int k = 0; k < 8; ++k)
        reg.state[static_cast<std::size_t>(k)] =
            inv_sqrt2 * (reg.state[static_cast<std::size_t>(k)] +
                         static_cast<double>(direction) *
                             rot[static_cast<std::size_t>(k)]);
}

void phase_gate(const MajoranaAlgebra& alg, MajoranaRegister& reg, double theta,
                Qubit q, Axis ax) {
    const Mat8 sigma = alg.pauli(q, ax);
    cvec rot = reg.state;
    apply(sigma, rot);
    const double c = std::cos(theta), s = std::sin(theta);
    for (int k = 0; k < 8; ++k)
        reg.state[static_cast<std::size_t>(k)] =
            c * reg.state[static_cast<std::size_t>(k)] +
            cxd(0.0, s) * rot[static_cast<std::size_t>(k)];
}

double pauli_correlator(const MajoranaAlgebra& alg, const MajoranaRegister& reg,
                        Axis ax_lower, Axis ax_upper) {
    const Mat8 op = alg.pauli(Qubit::lower, ax_lower) *
                    alg.pauli(Qubit::upper, ax_upper);
    cvec v = reg.state;
    apply(op, v);
    return vdot(reg.state, v).real();
}

double chsh_value(const MajoranaAlgebra& alg, const MajoranaRegister& reg) {
    return pauli_correlator(alg, reg, Axis::x, Axis::x) -
           pauli_correlator(alg, reg, Axis::x, Axis::z) +
           pauli_correlator(alg, reg, Axis::z, Axis::x) +
           pauli_correlator(alg, reg, Axis::z, Axis::z);
}

double chsh_predicted(double theta) {
    return 2.0 * std::sqrt(2.0) * std::cos(2.0 * theta - 0.25 * pi);
}

SampledChsh chsh_sampled(const MajoranaAlgebra& alg,
                         const MajoranaRegister& bell, double theta, long shots,
                         std::uint64_t seed) {
    if (shots < 4) throw ConfigError("chsh_sampled: need at least 4 shots");
    MajoranaRegister base = bell;
    phase_gate(alg, base, theta, Qubit::lower, Axis::y);

    const Axis lowers[4] = {Axis::x, Axis::x, Axis::z, Axis::z};
    const Axis uppers[4] = {Axis::x, Axis::z, Axis::x, Axis::z};
    const double signs[4] = {1.0, -1.0, 1.0, 1.0};

    SampledChsh out;
    out.shots = shots;
    double var_sum = 0.0;
    for (int c = 0; c < 4; ++c) {
        const long n = shots / 4;
        std::mt19937_64 rng = seeded_engine(subseed(seed, static_cast<std::uint64_t>(c)));
        const auto [la, lb] = MajoranaAlgebra::pauli_pair(Qubit::lower, lowers[c]);
        const auto [ua, ub] = MajoranaAlgebra::pauli_pair(Qubit::upper, uppers[c]);
        long sum = 0;
        for (long s = 0; s < n; ++s) {
            MajoranaRegister shot = base;
            const int r1 =
                measure_parity(alg, shot, la, lb, std::nullopt, rng).outcome;
            const int r2 =
                measure_parity(alg, shot, ua, ub, std::nullopt, rng).outcome;
            sum += r1 * r2;
        }
        const double est = static_cast<double>(sum) / static_cast<double>(n);
        out.estimate += signs[c] * est;
        var_sum += (1.0 - est * est) / static_cast<double>(n);
    }
    out.standard_error = std::sqrt(var_sum);
    return out;
}

double clifford_ceiling_search(const MajoranaAlgebra& alg, int n_trials,
                               std::uint64_t seed, bool include_magic) {
    if (n_trials < 1)
        throw ConfigError("clifford_ceiling_search: n_trials must be >= 1");
    double best = -4.0;
    for (int trial = 0; trial < n_trials; ++trial) {
        std::mt19937_64 rng =
            seeded_engine(subseed(seed, static_cast<std::uint64_t>(trial)));
        MajoranaRegister reg = make_register(alg, +1);
        prepare_bell(alg, reg, rng);
        const int len = static_cast<int>(rng() % 21);
        for (int step = 0; step < len; ++step) {
            const int kind = static_cast<int>(rng() % (include_magic ? 3 : 2));
            if (kind == 2) {
                phase_gate(alg, reg, 0.125 * pi, Qubit::lower, Axis::y);
                continue;
            }
            const int a = static_cast<int>(rng() % 6);
            const int b = (a + 1 + static_cast<int>(rng() % 5)) % 6;
            if (kind == 0) {
                const int dir = (rng() & 1u) ? +1 : -1;
                braid(alg, reg, a, b, dir);
            } else {
                measure_parity(alg, reg, a, b, std::nullopt, rng);
            }
        }
        best = std::max(best, chsh_value(alg, reg));
    }
    return best;
}

} // namespace vgate
