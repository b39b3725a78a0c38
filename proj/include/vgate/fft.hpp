#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "vgate/errors.hpp"

namespace vgate {

/// In-place iterative radix-2 Cooley-Tukey FFT. n must be a power of two.
/// inverse=true applies the conjugate transform and divides by n, so
/// fft_pow2(fft_pow2(a, false), true) is the identity up to rounding.
/// Deterministic: fixed butterfly order, twiddles recomputed per stage.
inline void fft_pow2(std::vector<std::complex<double>>& a, bool inverse) {
    const std::size_t n = a.size();
    if (n == 0 || (n & (n - 1)) != 0)
        throw ConfigError("fft_pow2: length must be a power of two");
    // Bit-reversal permutation.
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    const double pi_local = 3.141592653589793238462643383279502884;
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = 2.0 * pi_local / static_cast<double>(len) *
                           (inverse ? 1.0 : -1.0);
        for (std::size_t i = 0; i < n; i += len) {
            for (std::size_t k = 0; k < len / 2; ++k) {
                // Direct twiddle per butterfly: O(n log n) trig calls, but
                // rounding stays at machine epsilon and the sizes used here
                // (<= 65536) make the cost irrelevant.
                const std::complex<double> w =
                    std::polar(1.0, ang * static_cast<double>(k));
                const std::complex<double> u = a[i + k];
                const std::complex<double> v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
            }
        }
    }
    if (inverse) {
        const std::complex<double> inv(1.0 / static_cast<double>(n), 0.0);
        for (std::complex<double>& x : a) x *= inv;
    }
}

/// 2D FFT over an nx-by-ny row-major array (index = ix*ny + iy).
inline void fft2_pow2(std::vector<std::complex<double>>& a, std::size_t nx,
                      std::size_t ny, bool inverse) {
    if (a.size() != nx * ny)
        throw ConfigError("fft2_pow2: size mismatch");
    std::vector<std::complex<double>> row(ny), col(nx);
    for (std::size_t ix = 0; ix < nx; ++ix) {
        std::copy(a.begin() + static_cast<std::ptrdiff_t>(ix * ny),
                  a.begin() + static_cast<std::ptrdiff_t>((ix + 1) * ny),
                  row.begin());
        fft_pow2(row, inverse);
        std::copy(row.begin(), row.end(),
                  a.begin() + static_cast<std::ptrdiff_t>(ix * ny));
    }
    for (std::size_t iy = 0; iy < ny; ++iy) {
        for (std::size_t ix = 0; ix < nx; ++ix) col[ix] = a[ix * ny + iy];
        fft_pow2(col, inverse);
        for (std::size_t ix = 0; ix < nx; ++ix) a[ix * ny + iy] = col[ix];
    }
}

} // namespace vgate
