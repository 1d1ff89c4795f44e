#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "hurstlab/core/errors.hpp"

namespace hurstlab::fft {

// In-place iterative radix-2 Cooley-Tukey. n must be a power of two.
inline void transform(std::vector<std::complex<double>>& a, bool inverse) {
    const std::size_t n = a.size();
    if (n == 0 || (n & (n - 1)) != 0) throw validation_error("fft: size must be a power of two");
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    const double pi = 3.14159265358979323846;
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = 2.0 * pi / static_cast<double>(len) * (inverse ? 1.0 : -1.0);
        const std::complex<double> wl(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const std::complex<double> u = a[i + k];
                const std::complex<double> v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wl;
            }
        }
    }
    if (inverse) {
        const double inv = 1.0 / static_cast<double>(n);
        for (auto& x : a) x *= inv;
    }
}

inline std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

inline std::vector<std::complex<double>> forward_padded(const std::vector<double>& x,
                                                        std::size_t n) {
    std::vector<std::complex<double>> a(n);
    for (std::size_t i = 0; i < x.size(); ++i) a[i] = x[i];
    transform(a, false);
    return a;
}

// Linear convolution of two real sequences, out[k] = sum_j x[j] y[k-j],
// length |x| + |y| - 1.
inline std::vector<double> convolve(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.empty() || y.empty()) return {};
    const std::size_t out_len = x.size() + y.size() - 1;
    const std::size_t n = next_pow2(out_len);
    auto fx = forward_padded(x, n);
    auto fy = forward_padded(y, n);
    for (std::size_t i = 0; i < n; ++i) fx[i] *= fy[i];
    transform(fx, true);
    std::vector<double> out(out_len);
    for (std::size_t i = 0; i < out_len; ++i) out[i] = fx[i].real();
    return out;
}

}  // namespace hurstlab::fft
