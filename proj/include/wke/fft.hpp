#pragma once

// Minimal radix-2 complex FFT used for the spectral propagator and the
// inverse-transform kernels.  A hand-rolled transform keeps results
// bit-reproducible across platforms (the determinism contract of the CLI),
// which rules out vendored FFT libraries with architecture-dependent plans.

#include <complex>
#include <vector>

#include "wke/common.hpp"

namespace wke {

// In-place iterative Cooley-Tukey; size must be a power of two.
// sign = -1 gives the forward transform sum f[j] e^{-2*pi*i*jk/N},
// sign = +1 the unnormalized inverse.
inline void fft_inplace(std::vector<complex_t>& data, int sign) {
    const std::size_t n = data.size();
    if (n == 0 || (n & (n - 1)) != 0)
        throw precondition_error("fft_inplace: size must be a nonzero power of two");
    // Bit-reversal permutation.
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(data[i], data[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = sign * 2.0 * pi / static_cast<double>(len);
        const complex_t wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            complex_t w(1.0, 0.0);
            for (std::size_t j = 0; j < len / 2; ++j) {
                const complex_t u = data[i + j];
                const complex_t v = data[i + j + len / 2] * w;
                data[i + j] = u + v;
                data[i + j + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
}

inline std::vector<complex_t> fft(std::vector<complex_t> data, int sign) {
    fft_inplace(data, sign);
    return data;
}

}  // namespace wke
