#pragma once

#include <array>
#include <cmath>
#include <cstdint>

#include "hurstlab/core/errors.hpp"

namespace hurstlab::rng {

// Philox4x32-10 counter-based generator (Salmon et al., "Parallel random
// numbers: as easy as 1, 2, 3"). A block is a pure function of
// (key, counter), which is what makes every sampler in this library
// replayable: streams never share state and never need to be skipped.
struct Philox4x32 {
    static constexpr std::uint32_t kMul0 = 0xD2511F53u;
    static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

    static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> ctr,
                                              std::array<std::uint32_t, 2> key) noexcept {
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * ctr[0];
            const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * ctr[2];
            const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
            const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
            const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
            const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
            ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
            key[0] += kWeyl0;
            key[1] += kWeyl1;
        }
        return ctr;
    }
};

// Inverse normal CDF, Wichura's algorithm AS 241 (PPND16). Relative error
// below 1e-15 over the full open unit interval.
inline double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw validation_error("normal_quantile: p must lie in (0,1)");
    const double q = p - 0.5;
    if (std::fabs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        const double num = (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                                 6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
                               1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
                             1.3314166789178437745e2) * r + 3.3871328727963666080e0);
        const double den = (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
                                 3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
                               5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
                             4.2313330701600911252e1) * r + 1.0);
        return q * num / den;
    }
    double r = (q < 0.0) ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double value;
    if (r <= 5.0) {
        r -= 1.6;
        const double num = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                                 2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
                               3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
                             4.63033784615654529590e0) * r + 1.42343711074968357734e0);
        const double den = (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                                 1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
                               6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
                             2.05319162663775882187e0) * r + 1.0);
        value = num / den;
    } else {
        r -= 5.0;
        const double num = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                                 1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
                               2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
                             5.46378491116411436990e0) * r + 6.65790464350110377720e0);
        const double den = (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                                 1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
                               1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
                             5.99832206555887937690e-1) * r + 1.0);
        value = num / den;
    }
    return (q < 0.0) ? -value : value;
}

// Injective per-task seed derivation: task index is mixed by an odd-constant
// multiply (a bijection mod 2^64), xor-folded with the master seed, then run
// through the splitmix64 finalizer (also a bijection). Distinct task indices
// under one master seed can never collide.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t task) {
    std::uint64_t z = master ^ (task * 0x9E3779B97F4A7C15ull);
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// One stream of uniforms/gaussians addressed by a 64-bit draw index.
// key = master seed, stream id distinguishes independent tasks; draws with
// the same (seed, stream, index) are bit-identical on every run and every
// thread layout.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          stream_lo_(static_cast<std::uint32_t>(stream)),
          stream_hi_(static_cast<std::uint32_t>(stream >> 32)) {}

    std::uint64_t bits(std::uint64_t index) const noexcept {
        const auto out = Philox4x32::block(
            {static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
             stream_lo_, stream_hi_},
            key_);
        return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
    }

    // Strictly inside (0,1): 53 significant bits centered on the cell.
    double uniform(std::uint64_t index) const noexcept {
        return (static_cast<double>(bits(index) >> 11) + 0.5) * 0x1.0p-53;
    }

    // Standard normal via the inverse CDF; the transform is fixed per build.
    double gaussian(std::uint64_t index) const { return normal_quantile(uniform(index)); }

private:
    std::array<std::uint32_t, 2> key_;
    std::uint32_t stream_lo_;
    std::uint32_t stream_hi_;
};

}  // namespace hurstlab::rng
