#include "vgate/lanczos.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>

#include "vgate/errors.hpp"
#include "vgate/rng.hpp"

namespace vgate {

cxd vdot(const cvec& a, const cvec& b) {
    cxd s(0.0, 0.0);
    const std::size_t n = a.size();
    for (std::size_t i = 0; i < n; ++i) s += std::conj(a[i]) * b[i];
    return s;
}

double vnorm(const cvec& a) {
    double s = 0.0;
    for (const cxd& x : a) s += std::norm(x);
    return std::sqrt(s);
}

void vaxpy(cxd alpha, const cvec& x, cvec& y) {
    const std::size_t n = x.size();
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void vscale(cxd alpha, cvec& x) {
    for (cxd& v : x) v *= alpha;
}

cvec seeded_unit_vector(std::size_t n, std::uint64_t seed) {
    cvec v(n);
    std::uint64_t state = seed;
    for (std::size_t i = 0; i < n; ++i) {
        // Two 53-bit uniforms in [-0.5, 0.5).
        const double re =
            static_cast<double>(splitmix64(state) >> 11) * 0x1p-53 - 0.5;
        const double im =
            static_cast<double>(splitmix64(state) >> 11) * 0x1p-53 - 0.5;
        v[i] = cxd(re, im);
    }
    const double nr = vnorm(v);
    if (nr == 0.0) { // astronomically unlikely; keep the solver total anyway
        v[0] = cxd(1.0, 0.0);
        return v;
    }
    vscale(cxd(1.0 / nr, 0.0), v);
    return v;
}

// ---------------------------------------------------------------------------
// Small dense Hermitian eigensolver: cyclic complex Jacobi.
// ---------------------------------------------------------------------------

void hermitian_eig_small(int m, std::vector<cxd>& a, std::vector<double>& w,
                         std::vector<cxd>& z) {
    auto at = [&](std::vector<cxd>& mat, int r, int c) -> cxd& {
        return mat[static_cast<std::size_t>(c) * m + r];
    };
    z.assign(static_cast<std::size_t>(m) * m, cxd(0.0, 0.0));
    for (int i = 0; i < m; ++i) at(z, i, i) = cxd(1.0, 0.0);

    double fro = 0.0;
    for (const cxd& x : a) fro += std::norm(x);
    fro = std::sqrt(fro);
    const double stop = std::max(1e-300, 1e-15 * fro);

    for (int sweep = 0; sweep < 60; ++sweep) {
        double off = 0.0;
        for (int q = 1; q < m; ++q)
            for (int p = 0; p < q; ++p) off += std::norm(at(a, p, q));
        if (std::sqrt(off) <= stop) break;

        for (int q = 1; q < m; ++q) {
            for (int p = 0; p < q; ++p) {
                const cxd g = at(a, p, q);
                const double rho = std::abs(g);
                if (rho <= 1e-300) {
                    at(a, p, q) = cxd(0.0, 0.0);
                    at(a, q, p) = cxd(0.0, 0.0);
                    continue;
                }
                const cxd u = g / rho;
                const double alpha = at(a, p, p).real();
                const double beta = at(a, q, q).real();
                const double tau = (beta - alpha) / (2.0 * rho);
                // smaller-magnitude root of t^2 - 2*tau*t - 1 = 0
                double t;
                if (tau >= 0.0)
                    t = -1.0 / (tau + std::sqrt(1.0 + tau * tau));
                else
                    t = 1.0 / (-tau + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                // Columns: col_p <- c*col_p + s*conj(u)*col_q,
                //          col_q <- -s*u*col_p + c*col_q  (on A and Z).
                for (int k = 0; k < m; ++k) {
                    const cxd akp = at(a, k, p), akq = at(a, k, q);
                    at(a, k, p) = c * akp + s * std::conj(u) * akq;
                    at(a, k, q) = -s * u * akp + c * akq;
                    const cxd zkp = at(z, k, p), zkq = at(z, k, q);
                    at(z, k, p) = c * zkp + s * std::conj(u) * zkq;
                    at(z, k, q) = -s * u * zkp + c * zkq;
                }
                // Rows: row_p <- c*row_p + s*u*row_q,
                //       row_q <- -s*conj(u)*row_p + c*row_q.
                for (int k = 0; k < m; ++k) {
                    const cxd apk = at(a, p, k), aqk = at(a, q, k);
                    at(a, p, k) = c * apk + s * u * aqk;
                    at(a, q, k) = -s * std::conj(u) * apk + c * aqk;
                }
                at(a, p, p) = cxd(alpha + t * rho, 0.0);
                at(a, q, q) = cxd(beta - t * rho, 0.0);
                at(a, p, q) = cxd(0.0, 0.0);
                at(a, q, p) = cxd(0.0, 0.0);
            }
        }
    }

    // Sort ascending (stable: equal values keep subspace order).
    std::vector<int> order(static_cast<std::size_t>(m));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int i, int j) {
        return at(a, i, i).real() < at(a, j, j).real();
    });
    w.resize(static_cast<std::size_t>(m));
    std::vector<cxd> zs(static_cast<std::size_t>(m) * m);
    for (int c = 0; c < m; ++c) {
        w[static_cast<std::size_t>(c)] = at(a, order[c], order[c]).real();
        for (int r = 0; r < m; ++r)
            zs[static_cast<std::size_t>(c) * m + r] = at(z, r, order[c]);
    }
    z.swap(zs);
}

// ---------------------------------------------------------------------------
// Real symmetric tridiagonal QL with implicit shifts.
// ---------------------------------------------------------------------------

void tridiag_eig(std::vector<double>& d, std::vector<double>& e, int n,
                 std::vector<double>* z) {
    if (n == 1) return;
    auto zat = [&](int r, int c) -> double& {
        return (*z)[static_cast<std::size_t>(c) * n + r];
    };
    e.resize(static_cast<std::size_t>(n), 0.0);
    e[static_cast<std::size_t>(n) - 1] = 0.0;

    for (int l = 0; l < n; ++l) {
        int iter = 0;
        int m;
        do {
            for (m = l; m < n - 1; ++m) {
                const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
                if (std::abs(e[m]) <= 1e-16 * dd) break;
            }
            if (m != l) {
                if (iter++ == 80)
                    throw SolverFailure("tridiag_eig: too many QL iterations");
                double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
                double r = std::hypot(g, 1.0);
                g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
                double s = 1.0, c = 1.0, p = 0.0;
                int i;
                for (i = m - 1; i >= l; --i) {
                    double f = s * e[i];
                    const double b = c * e[i];
                    r = std::hypot(f, g);
                    e[i + 1] = r;
                    if (r == 0.0) {
                        d[i + 1] -= p;
                        e[m] = 0.0;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + 2.0 * c * b;
                    p = s * r;
                    d[i + 1] = g + p;
                    g = c * r - b;
                    if (z != nullptr) {
                        for (int k = 0; k < n; ++k) {
                            f = zat(k, i + 1);
                            zat(k, i + 1) = s * zat(k, i) + c * f;
                            zat(k, i) = c * zat(k, i) - s * f;
                        }
                    }
                }
                if (r == 0.0 && i >= l) continue;
                d[l] -= p;
                e[l] = g;
                e[m] = 0.0;
            }
        } while (m != l);
    }
}

// ---------------------------------------------------------------------------
// Fully reorthogonalized Lanczos.
// ---------------------------------------------------------------------------

EigResult lanczos_lowest(std::size_t n, const MatVec& matvec,
                         const LanczosOptions& opt) {
    if (opt.n_eig < 1) throw ConfigError("lanczos_lowest: n_eig must be >= 1");
    const int want = opt.n_eig;
    const int mmax =
        std::min<std::size_t>(static_cast<std::size_t>(opt.max_iter), n);
    if (static_cast<std::size_t>(want) > n)
        throw ConfigError("lanczos_lowest: n_eig exceeds the space dimension");

    std::vector<cvec> basis;
    basis.reserve(static_cast<std::size_t>(mmax) + 1);
    basis.push_back(seeded_unit_vector(n, opt.seed));

    std::vector<double> alpha, beta; // T diag / subdiag
    cvec w(n), tmp(n);

    EigResult out;
    auto finalize = [&](int mm, const std::vector<double>& evals,
                        const std::vector<double>& zfull, double maxres,
                        bool conv) {
        out.values.assign(evals.begin(), evals.begin() + want);
        out.vectors.assign(static_cast<std::size_t>(want), cvec(n, cxd(0, 0)));
        for (int k = 0; k < want; ++k) {
            for (int j = 0; j < mm; ++j) {
                const double zc = zfull[static_cast<std::size_t>(k) * mm + j];
                if (zc != 0.0)
                    vaxpy(cxd(zc, 0.0), basis[static_cast<std::size_t>(j)],
                          out.vectors[static_cast<std::size_t>(k)]);
            }
            const double nr = vnorm(out.vectors[static_cast<std::size_t>(k)]);
            vscale(cxd(1.0 / nr, 0.0), out.vectors[static_cast<std::size_t>(k)]);
        }
        out.iterations = mm;
        out.max_residual = maxres;
        out.converged = conv;
    };

    // Diagonalize the order-mm tridiagonal section; returns eigenvalues
    // ascending and the matching tridiagonal eigenvectors (column-major,
    // mm x mm, permuted to ascending order).
    auto section_eig = [&](int mm, std::vector<double>& evals,
                           std::vector<double>& zperm) {
        std::vector<double> dd(alpha.begin(), alpha.begin() + mm);
        std::vector<double> ee(mm > 1 ? std::vector<double>(beta.begin(),
                                                            beta.begin() + mm - 1)
                                      : std::vector<double>());
        std::vector<double> zz(static_cast<std::size_t>(mm) * mm, 0.0);
        for (int i = 0; i < mm; ++i) zz[static_cast<std::size_t>(i) * mm + i] = 1.0;
        tridiag_eig(dd, ee, mm, &zz);
        std::vector<int> order(static_cast<std::size_t>(mm));
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](int i, int j) { return dd[i] < dd[j]; });
        evals.resize(static_cast<std::size_t>(mm));
        zperm.resize(static_cast<std::size_t>(mm) * mm);
        for (int c = 0; c < mm; ++c) {
            evals[static_cast<std::size_t>(c)] = dd[order[c]];
            for (int r = 0; r < mm; ++r)
                zperm[static_cast<std::size_t>(c) * mm + r] =
                    zz[static_cast<std::size_t>(order[c]) * mm + r];
        }
    };

    for (int j = 0; j < mmax; ++j) {
        matvec(basis[static_cast<std::size_t>(j)], w);
        const double aj = vdot(basis[static_cast<std::size_t>(j)], w).real();
        alpha.push_back(aj);
        vaxpy(cxd(-aj, 0.0), basis[static_cast<std::size_t>(j)], w);
        if (j > 0)
            vaxpy(cxd(-beta[static_cast<std::size_t>(j) - 1], 0.0),
                  basis[static_cast<std::size_t>(j) - 1], w);
        // Full reorthogonalization, two passes of classical Gram-Schmidt.
        for (int pass = 0; pass < 2; ++pass)
            for (const cvec& u : basis) {
                const cxd c = vdot(u, w);
                if (std::abs(c) > 0.0) vaxpy(-c, u, w);
            }
        const double bj = vnorm(w);

        const int mm = j + 1;
        const bool check = (mm >= want) && (mm % 5 == 0 || mm == mmax ||
                                            bj < 1e-14 * (std::abs(aj) + 1.0));
        if (check) {
            std::vector<double> evals, zperm;
            section_eig(mm, evals, zperm);
            const double scale =
                opt.scale_hint > 0.0
                    ? opt.scale_hint
                    : std::max(std::abs(evals.front()), std::abs(evals.back())) + 1.0;
            double maxres = 0.0;
            for (int k = 0; k < want; ++k) {
                const double res =
                    bj * std::abs(zperm[static_cast<std::size_t>(k) * mm + mm - 1]);
                maxres = std::max(maxres, res);
            }
            if (maxres <= opt.tol * scale ||
                (bj < 1e-14 * scale && mm >= want + 2)) {
                finalize(mm, evals, zperm, maxres, true);
                return out;
            }
            if (mm == mmax) {
                finalize(mm, evals, zperm, maxres, false);
                if (static_cast<std::size_t>(mmax) >= n) {
                    // Exhausted the whole space: the answer is exact.
                    out.converged = true;
                    return out;
                }
                throw SolverFailure(
                    "lanczos_lowest: residual " + std::to_string(maxres) +
                    " after " + std::to_string(mm) + " iterations");
            }
        }
        if (bj < 1e-300) {
            // Invariant subspace hit before convergence: restart direction.
            basis.push_back(seeded_unit_vector(n, opt.seed + 0x5bull * (j + 1)));
            for (int pass = 0; pass < 2; ++pass)
                for (std::size_t u = 0; u + 1 < basis.size(); ++u) {
                    const cxd c = vdot(basis[u], basis.back());
                    vaxpy(-c, basis[u], basis.back());
                }
            const double nr = vnorm(basis.back());
            if (nr < 1e-12) throw SolverFailure("lanczos_lowest: basis exhausted");
            vscale(cxd(1.0 / nr, 0.0), basis.back());
            beta.push_back(0.0);
        } else {
            vscale(cxd(1.0 / bj, 0.0), w);
            basis.push_back(w);
            beta.push_back(bj);
        }
    }
    throw SolverFailure("lanczos_lowest: iteration budget exhausted");
}

// ---------------------------------------------------------------------------
// LOBPCG.
// ---------------------------------------------------------------------------

namespace {

/// Two-pass modified Gram-Schmidt orthonormalization of `cols`, mirroring
/// every elementary operation onto `hcols` so that hcols[k] stays equal to
/// H * cols[k] without extra matvecs. Columns whose norm collapses below
/// `drop_tol` times their incoming norm are removed (never the first `keep`
/// columns, which are assumed independent). Returns the surviving count.
int mgs_orthonormalize(std::vector<cvec>& cols, std::vector<cvec>& hcols,
                       int keep, double drop_tol) {
    std::size_t out = 0;
    for (std::size_t j = 0; j < cols.size(); ++j) {
        cvec v = std::move(cols[j]);
        cvec hv = std::move(hcols[j]);
        const double pre = vnorm(v);
        for (int pass = 0; pass < 2; ++pass) {
            for (std::size_t i = 0; i < out; ++i) {
                const cxd c = vdot(cols[i], v);
                if (c != cxd(0.0, 0.0)) {
                    vaxpy(-c, cols[i], v);
                    vaxpy(-c, hcols[i], hv);
                }
            }
        }
        const double post = vnorm(v);
        if (static_cast<int>(out) >= keep && post < drop_tol * (pre + 1e-300)) {
            continue; // dependent direction; drop it
        }
        if (post < 1e-300) {
            if (static_cast<int>(out) < keep)
                throw SolverFailure("lobpcg: X block lost rank");
            continue;
        }
        vscale(cxd(1.0 / post, 0.0), v);
        vscale(cxd(1.0 / post, 0.0), hv);
        cols[out] = std::move(v);
        hcols[out] = std::move(hv);
        ++out;
    }
    cols.resize(out);
    hcols.resize(out);
    return static_cast<int>(out);
}

} // namespace

EigResult lobpcg_lowest(std::size_t n, const MatVec& matvec,
                        const Precond& precond, const std::vector<cvec>& x0,
                        const LobpcgOptions& opt) {
    const int b = opt.block;
    if (b < 1) throw ConfigError("lobpcg_lowest: block must be >= 1");
    if (static_cast<std::size_t>(3 * b) > n)
        throw ConfigError("lobpcg_lowest: block too large for the space");

    // Start block.
    std::vector<cvec> X;
    if (static_cast<int>(x0.size()) == b &&
        std::all_of(x0.begin(), x0.end(),
                    [&](const cvec& v) { return v.size() == n; })) {
        X = x0;
    } else {
        for (int k = 0; k < b; ++k)
            X.push_back(seeded_unit_vector(n, opt.seed + 1000003ull * k));
    }
    std::vector<cvec> HX(static_cast<std::size_t>(b));
    for (int k = 0; k < b; ++k) {
        HX[static_cast<std::size_t>(k)].assign(n, cxd(0, 0));
    }
    // Orthonormalize X, then compute its H columns with fresh matvecs.
    {
        for (std::size_t j = 0; j < X.size(); ++j) {
            for (int pass = 0; pass < 2; ++pass)
                for (std::size_t i = 0; i < j; ++i) {
                    const cxd c = vdot(X[i], X[j]);
                    vaxpy(-c, X[i], X[j]);
                }
            const double nr = vnorm(X[j]);
            if (nr < 1e-12)
                X[j] = seeded_unit_vector(n, opt.seed + 777ull * (j + 1));
            else
                vscale(cxd(1.0 / nr, 0.0), X[j]);
        }
        for (int k = 0; k < b; ++k)
            matvec(X[static_cast<std::size_t>(k)], HX[static_cast<std::size_t>(k)]);
    }

    std::vector<cvec> P, HP; // LOBPCG direction block (empty first iteration)
    std::vector<double> theta(static_cast<std::size_t>(b), 0.0);

    EigResult out;
    double best_res = std::numeric_limits<double>::infinity();
    int since_best = 0;

    cvec r(n), w(n);
    for (int it = 0; it < opt.max_iter; ++it) {
        // Rayleigh quotients and residuals of the current block.
        double maxres = 0.0;
        std::vector<cvec> W, HW;
        for (int k = 0; k < b; ++k) {
            theta[static_cast<std::size_t>(k)] =
                vdot(X[static_cast<std::size_t>(k)], HX[static_cast<std::size_t>(k)])
                    .real();
            r = HX[static_cast<std::size_t>(k)];
            vaxpy(cxd(-theta[static_cast<std::size_t>(k)], 0.0),
                  X[static_cast<std::size_t>(k)], r);
            maxres = std::max(maxres, vnorm(r));
            if (precond) {
                w.assign(n, cxd(0, 0));
                precond(r, w);
                W.push_back(w);
            } else {
                W.push_back(r);
            }
        }
        double tmax = 0.0;
        for (double t : theta) tmax = std::max(tmax, std::abs(t));
        const double scale = opt.scale_hint > 0.0 ? opt.scale_hint : tmax + 1.0;

        out.iterations = it;
        out.max_residual = maxres;
        if (maxres <= opt.tol * scale) {
            out.converged = true;
            break;
        }
        // Stagnation means no meaningful progress at all, not merely slow
        // convergence: a stiff unpreconditioned problem legitimately gains
        // only a few percent per iteration, so the trip-wire is a long
        // window of sub-1% improvement (a machine-precision floor jitters
        // well inside that).
        if (maxres < 0.99 * best_res) {
            best_res = maxres;
            since_best = 0;
        } else if (++since_best >= 50) {
            // Residual plateau (machine-precision floor). Accept if close.
            if (maxres <= 100.0 * opt.tol * scale) {
                out.converged = true;
                break;
            }
            if (opt.throw_on_failure)
                throw SolverFailure("lobpcg_lowest: stagnated at residual " +
                                    std::to_string(maxres));
            break;
        }
        if (it == opt.max_iter - 1) {
            if (opt.throw_on_failure)
                throw SolverFailure("lobpcg_lowest: residual " +
                                    std::to_string(maxres) + " after " +
                                    std::to_string(it + 1) + " iterations");
            break;
        }

        HW.assign(W.size(), cvec());
        for (std::size_t k = 0; k < W.size(); ++k) {
            HW[k].assign(n, cxd(0, 0));
            matvec(W[k], HW[k]);
        }

        // Subspace S = [X | W | P], orthonormalized with H-columns mirrored.
        std::vector<cvec> S, HS;
        S.reserve(3 * static_cast<std::size_t>(b));
        HS.reserve(3 * static_cast<std::size_t>(b));
        for (int k = 0; k < b; ++k) {
            S.push_back(X[static_cast<std::size_t>(k)]);
            HS.push_back(HX[static_cast<std::size_t>(k)]);
        }
        for (std::size_t k = 0; k < W.size(); ++k) {
            S.push_back(std::move(W[k]));
            HS.push_back(std::move(HW[k]));
        }
        for (std::size_t k = 0; k < P.size(); ++k) {
            S.push_back(P[k]);
            HS.push_back(HP[k]);
        }
        const int m = mgs_orthonormalize(S, HS, b, 1e-8);

        // Rayleigh-Ritz on the m-dimensional subspace.
        std::vector<cxd> G(static_cast<std::size_t>(m) * m);
        for (int cc = 0; cc < m; ++cc)
            for (int rr = 0; rr < m; ++rr) {
                if (rr > cc) continue;
                const cxd v = vdot(S[static_cast<std::size_t>(rr)],
                                   HS[static_cast<std::size_t>(cc)]);
                G[static_cast<std::size_t>(cc) * m + rr] = v;
                G[static_cast<std::size_t>(rr) * m + cc] = std::conj(v);
            }
        for (int dd = 0; dd < m; ++dd)
            G[static_cast<std::size_t>(dd) * m + dd] =
                cxd(G[static_cast<std::size_t>(dd) * m + dd].real(), 0.0);
        std::vector<double> evals;
        std::vector<cxd> Y;
        hermitian_eig_small(m, G, evals, Y);

        // New X (and P = the component of new X outside the old X block).
        std::vector<cvec> Xn(static_cast<std::size_t>(b), cvec(n, cxd(0, 0)));
        std::vector<cvec> HXn(static_cast<std::size_t>(b), cvec(n, cxd(0, 0)));
        std::vector<cvec> Pn(static_cast<std::size_t>(b), cvec(n, cxd(0, 0)));
        std::vector<cvec> HPn(static_cast<std::size_t>(b), cvec(n, cxd(0, 0)));
        for (int k = 0; k < b; ++k) {
            for (int j = 0; j < m; ++j) {
                const cxd y = Y[static_cast<std::size_t>(k) * m + j];
                if (y == cxd(0.0, 0.0)) continue;
                vaxpy(y, S[static_cast<std::size_t>(j)],
                      Xn[static_cast<std::size_t>(k)]);
                vaxpy(y, HS[static_cast<std::size_t>(j)],
                      HXn[static_cast<std::size_t>(k)]);
                if (j >= b) {
                    vaxpy(y, S[static_cast<std::size_t>(j)],
                          Pn[static_cast<std::size_t>(k)]);
                    vaxpy(y, HS[static_cast<std::size_t>(j)],
                          HPn[static_cast<std::size_t>(k)]);
                }
            }
        }
        // Orthonormalize the new P block among itself (drop collapsed ones).
        mgs_orthonormalize(Pn, HPn, 0, 1e-8);
        X = std::move(Xn);
        HX = std::move(HXn);
        P = std::move(Pn);
        HP = std::move(HPn);
        for (int k = 0; k < b; ++k)
            theta[static_cast<std::size_t>(k)] = evals[static_cast<std::size_t>(k)];
    }

    out.values.assign(theta.begin(), theta.end());
    out.vectors = X;
    std::vector<int> order(static_cast<std::size_t>(b));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int i, int j) {
        return out.values[static_cast<std::size_t>(i)] <
               out.values[static_cast<std::size_t>(j)];
    });
    EigResult sorted;
    sorted.iterations = out.iterations;
    sorted.max_residual = out.max_residual;
    sorted.converged = out.converged;
    for (int k = 0; k < b; ++k) {
        sorted.values.push_back(out.values[static_cast<std::size_t>(order[k])]);
        sorted.vectors.push_back(
            std::move(out.vectors[static_cast<std::size_t>(order[k])]));
    }
    return sorted;
}

} // namespace vgate
