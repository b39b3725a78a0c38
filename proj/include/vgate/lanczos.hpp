#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

namespace vgate {

using cxd = std::complex<double>;
using cvec = std::vector<cxd>;

/// Operator and preconditioner callbacks. `out` is pre-sized to match `in`.
/// Implementations may parallelize internally, but must be bitwise
/// reproducible for any thread count (each output entry a pure function of
/// the input); every reduction inside the solvers themselves is serial and
/// fixed-order, so whole eigensolves are deterministic.
using MatVec = std::function<void(const cvec& in, cvec& out)>;
using Precond = std::function<void(const cvec& in, cvec& out)>;

/// Serial fixed-order BLAS-1 helpers (determinism is the point; the vectors
/// involved are small enough that this never dominates).
cxd vdot(const cvec& a, const cvec& b); // sum conj(a_i) * b_i
double vnorm(const cvec& a);
void vaxpy(cxd alpha, const cvec& x, cvec& y); // y += alpha * x
void vscale(cxd alpha, cvec& x);

/// Deterministic pseudo-random unit vector (splitmix64-driven, fixed order).
cvec seeded_unit_vector(std::size_t n, std::uint64_t seed);

/// Eigenpairs of a small dense Hermitian matrix by cyclic complex Jacobi
/// rotations. `a` is m-by-m column-major and is destroyed. Eigenvalues are
/// returned ascending in `w`; `z` receives the matching orthonormal
/// eigenvectors as columns (column-major). Intended for m <= 32 (the solvers
/// below use it on Rayleigh-Ritz Gram matrices of at most 9 columns).
void hermitian_eig_small(int m, std::vector<cxd>& a, std::vector<double>& w,
                         std::vector<cxd>& z);

/// Eigen-decomposition of a real symmetric tridiagonal matrix by the implicit
/// QL algorithm. On entry d[0..n-1] is the diagonal and e[0..n-2] the
/// subdiagonal; on exit d holds the (unsorted) eigenvalues. If z is non-null
/// it must hold an n-by-n column-major matrix (normally the identity) whose
/// columns are rotated into the eigenvectors.
void tridiag_eig(std::vector<double>& d, std::vector<double>& e, int n,
                 std::vector<double>* z);

struct EigResult {
    std::vector<double> values; ///< ascending
    std::vector<cvec> vectors;  ///< orthonormal, matching values
    int iterations = 0;
    double max_residual = 0.0; ///< max_i ||H x_i - theta_i x_i||
    bool converged = false;
};

struct LanczosOptions {
    int n_eig = 2;
    int max_iter = 400;
    double tol = 1e-12;        ///< residual <= tol * scale
    double scale_hint = 0.0;   ///< spectral scale; 0 -> max |Ritz value| + 1
    std::uint64_t seed = 0x9e3779b97f4a7c15ull;
};

/// Lowest eigenpairs by fully reorthogonalized Lanczos (two-pass classical
/// Gram-Schmidt against the whole basis each step). Deterministic: the start
/// vector is seeded, every reduction is serial. This is the reference solver;
/// it is also used cold-starting the sweep engine. Throws SolverFailure if
/// the basis is exhausted before convergence.
EigResult lanczos_lowest(std::size_t n, const MatVec& matvec,
                         const LanczosOptions& opt);

struct LobpcgOptions {
    int block = 2;
    int max_iter = 600;
    double tol = 1e-12;      ///< residual <= tol * scale
    double scale_hint = 0.0; ///< 0 -> max |Ritz value| + 1
    std::uint64_t seed = 0x243f6a8885a308d3ull;
    bool throw_on_failure = true;
};

/// Lowest `block` eigenpairs by LOBPCG over the subspace [X, W, P] with
/// Rayleigh-Ritz by the small Jacobi solver. `precond` may be empty
/// (identity). `x0` supplies warm-start columns (takes effect when it holds
/// exactly `block` vectors of length n); otherwise the start block is seeded.
/// Near machine precision the residual can stagnate; a plateau within 100x
/// of the target is accepted and reported via max_residual.
EigResult lobpcg_lowest(std::size_t n, const MatVec& matvec,
                        const Precond& precond, const std::vector<cvec>& x0,
                        const LobpcgOptions& opt);

} // namespace vgate
