#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "vgate/lanczos.hpp" // cxd, cvec

namespace vgate {

/// Dense 8x8 complex matrix (row-major), the full operator space of three
/// fermion modes. Everything in this module is exact state-vector algebra;
/// the dimension is tiny by design.
struct Mat8 {
    std::array<cxd, 64> a{};

    cxd& operator()(int r, int c) { return a[static_cast<std::size_t>(r) * 8 + c]; }
    const cxd& operator()(int r, int c) const {
        return a[static_cast<std::size_t>(r) * 8 + c];
    }
    static Mat8 identity();
    Mat8 adjoint() const;
};
Mat8 operator*(const Mat8& x, const Mat8& y);
Mat8 operator*(cxd s, const Mat8& x);
Mat8 operator+(const Mat8& x, const Mat8& y);
Mat8 operator-(const Mat8& x, const Mat8& y);
/// max |entry| of x - y; exact-zero checks compare against 0.0.
double max_abs_diff(const Mat8& x, const Mat8& y);
void apply(const Mat8& m, cvec& v);

enum class Qubit { lower, upper };
enum class Axis { x, y, z };

/// Six Majorana operators on three fermion modes, Jordan-Wigner built:
/// gamma_{2j-1} = (prod_{k<j} Z_k) X_j, gamma_{2j} = (prod_{k<j} Z_k) Y_j.
/// Canonical ordering (alpha1, alpha2, alpha3, beta1, beta2, beta3) =
/// gamma[0..5]: the lower qubit lives on the alphas, the upper on the betas.
///
/// Pauli dictionary, lower qubit: sigma_x = i a2 a3, sigma_y = i a1 a3,
/// sigma_z = i a1 a2. Upper qubit: Sigma_X = i b2 b3, Sigma_Y = i b3 b1,
/// Sigma_Z = i b2 b1. Both satisfy the cyclic algebra sigma_a sigma_b =
/// i sigma_c; the relative sign choice is the one under which the
/// forced-measurement Bell state comes out as (|uu> + |dd>)/sqrt(2) in the
/// z/Z basis (<zZ> = +1) so the standard CHSH combination reaches 2.
struct MajoranaAlgebra {
    std::array<Mat8, 6> gamma;
    Mat8 parity_total; ///< prod_j (-i g_{2j-1} g_{2j}) = Z1 Z2 Z3

    /// i * gamma[a] * gamma[b] (the parity bilinear measured for pair (a,b)).
    Mat8 bilinear(int a, int b) const;
    /// Dictionary operator for the chosen qubit and axis.
    Mat8 pauli(Qubit q, Axis ax) const;
    /// Majorana indices (a, b) with pauli(q, ax) == bilinear(a, b).
    static std::pair<int, int> pauli_pair(Qubit q, Axis ax);
};

MajoranaAlgebra build_algebra();

/// State of the six-MZM system. total_parity tags the sector; every
/// operation below preserves it (bilinears are even in the Majoranas).
struct MajoranaRegister {
    cvec state; ///< dim 8, unit norm
    int total_parity = +1;
};

/// Fresh register: |000> for total_parity +1, |100> for -1.
MajoranaRegister make_register(const MajoranaAlgebra& alg, int total_parity = +1);

struct MeasurementRecord {
    int outcome = 0;          ///< realized eigenvalue of i gamma_a gamma_b
    double probability = 0.0; ///< pre-measurement Born probability of it
};

/// Projective parity measurement of i gamma_a gamma_b with projectors
/// (1 +- i gamma_a gamma_b)/2. With `forced` empty the outcome is Born
/// sampled from `rng`; a forced outcome with probability < 1e-14 throws
/// ImpossibleOutcome. The register is updated in place and renormalized.
MeasurementRecord measure_parity(const MajoranaAlgebra& alg,
                                 MajoranaRegister& reg, int a, int b,
                                 std::optional<int> forced,
                                 std::mt19937_64& rng);

/// Forced-measurement Bell preparation: drive i alpha1 beta1 and then
/// i alpha2 beta2 into their -1 eigenstates. A wrong outcome is corrected by
/// measuring the auxiliary pair (wrong-outcome MZM, third MZM of its triple)
/// -- (alpha1, alpha3) resp. (alpha2, alpha3) -- and re-measuring the target,
/// repeated until success (cap 1000 rounds -> NonTermination; each round
/// succeeds with probability 1/2). The resulting two-qubit state is the Bell
/// state (|up up> + |down down>)/sqrt(2) in the z/Z dictionary basis.
void prepare_bell(const MajoranaAlgebra& alg, MajoranaRegister& reg,
                  std::mt19937_64& rng);

/// Exchange unitary exp(direction * (pi/4) gamma_a gamma_b)
///                = (1 + direction * gamma_a gamma_b)/sqrt(2).
void braid(const MajoranaAlgebra& alg, MajoranaRegister& reg, int a, int b,
           int direction);

/// exp(i theta Sigma) = cos(theta) + i sin(theta) Sigma for the dictionary
/// operator Sigma of (qubit, axis). theta = pi/4 about y reproduces a braid
/// up to global phase; general theta is the unprotected gate this library
/// simulates the hardware for.
void phase_gate(const MajoranaAlgebra& alg, MajoranaRegister& reg, double theta,
                Qubit q, Axis ax);

/// Exact expectation <pauli(lower, ax_lower) * pauli(upper, ax_upper)>; the
/// four x/z by X/Z combinations are the CHSH correlators.
double pauli_correlator(const MajoranaAlgebra& alg, const MajoranaRegister& reg,
                        Axis ax_lower, Axis ax_upper);

/// CHSH combination <x X> - <x Z> + <z X> + <z Z> (lower-qubit settings x, z;
/// upper-qubit settings X, Z), exact expectations on the state.
double chsh_value(const MajoranaAlgebra& alg, const MajoranaRegister& reg);

/// Closed-form prediction for the Bell state followed by exp(i theta sigma_y)
/// on the lower qubit: 2*sqrt(2)*cos(2 theta - pi/4).
double chsh_predicted(double theta);

struct SampledChsh {
    double estimate = 0.0;
    double standard_error = 0.0;
    long shots = 0;
};

/// Finite-statistics emulation: starting from the prepared register `bell`,
/// applies the lower-y phase gate of angle theta, then Born-samples each of
/// the four correlators with shots/4 shots. Standard error combines the four
/// binomial variances: sqrt(sum_i (1 - E_i^2)/n_i).
SampledChsh chsh_sampled(const MajoranaAlgebra& alg,
                         const MajoranaRegister& bell, double theta, long shots,
                         std::uint64_t seed);

/// Random Clifford-only sequences (braids and Born measurements, length
/// uniform in {0..20}) applied to a fresh Bell state; returns the maximum
/// CHSH value observed over n_trials seeded trials. Stays <= 2 + 1e-10
/// without magic; include_magic adds phase_gate(pi/8, lower, y) to the op
/// pool, which unlocks values up to 2*sqrt(2).
double clifford_ceiling_search(const MajoranaAlgebra& alg, int n_trials,
                               std::uint64_t seed, bool include_magic = false);

} // namespace vgate
