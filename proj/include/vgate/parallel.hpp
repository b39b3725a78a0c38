#pragma once

#include <cstddef>

#if defined(_OPENMP)
#include <omp.h>
#endif

namespace vgate {

/// Data-parallel loop over [0, n) with an explicit thread count.
///
/// Contract: results must be bitwise-independent of the thread count. Every
/// kernel used with this helper writes to its own output slot (index i) and
/// performs no cross-iteration reduction; any reduction is folded afterward
/// in index order by the caller. n_threads <= 1 runs the plain serial
/// reference loop -- the same loop the tests compare the parallel path
/// against. Without OpenMP support the serial path is always taken.
template <class F>
void parallel_for(std::size_t n, int n_threads, F&& body) {
    if (n_threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
#if defined(_OPENMP)
    // 'static' schedule: the iteration->thread map is a pure function of
    // (n, n_threads), and since iterations are independent the output is
    // identical to the serial loop regardless of the map anyway.
#pragma omp parallel for schedule(static) num_threads(n_threads)
    for (long long i = 0; i < static_cast<long long>(n); ++i)
        body(static_cast<std::size_t>(i));
#else
    for (std::size_t i = 0; i < n; ++i) body(i);
#endif
}

/// Number of hardware threads OpenMP would use, 1 without OpenMP.
inline int max_threads() {
#if defined(_OPENMP)
    return omp_get_max_threads();
#else
    return 1;
#endif
}

} // namespace vgate
