#pragma once

#include <cmath>
#include <span>
#include <string>

#include "hurstlab/core/errors.hpp"
#include "hurstlab/core/quadrature.hpp"

namespace hurstlab::fbm {

inline void check_hurst(double H) {
    if (!(H > 0.0 && H < 1.0)) throw validation_error("Hurst parameter must lie in (0,1)");
}

// Moving-average kernel K1 over the negative half-line; the argument s is the
// positive distance, i.e. the kernel value at -s.
inline double kernel_k1(double H, double t, double s) {
    check_hurst(H);
    if (!(t >= 0.0)) throw validation_error("kernel_k1: t must be >= 0");
    if (!(s > 0.0))
        throw validation_error(
            "kernel_k1: s must be > 0 (the s = 0 endpoint is singular; integrate cells exactly)");
    const double e = H - 0.5;
    return (std::pow(t + s, e) - std::pow(s, e)) / std::tgamma(H + 0.5);
}

// Moving-average kernel K2 on [0, t).
inline double kernel_k2(double H, double t, double s) {
    check_hurst(H);
    if (!(s >= 0.0 && s < t)) throw validation_error("kernel_k2: need 0 <= s < t");
    return std::pow(t - s, H - 0.5) / std::tgamma(H + 0.5);
}

// (x + shift)^e - x^e without cancellation, valid for x > 0, x + shift > 0.
inline double stable_power_diff(double e, double x, double shift) {
    if (x <= 0.0) return std::pow(x + shift, e);
    return std::pow(x, e) * std::expm1(e * std::log1p(shift / x));
}

// Unnormalized moving-average kernel (t-s)_+^{H-1/2} - (-s)_+^{H-1/2}.
inline double mvn_kernel(double t, double H, double s) {
    const double e = H - 0.5;
    if (s >= 0.0) return (s < t) ? std::pow(t - s, e) : 0.0;
    if (t <= s) return -std::pow(-s, e);  // only the second branch active
    return stable_power_diff(e, -s, t);   // both branches: (t-s)^e - (-s)^e
}

// Variance carried by the kernel of B_t^H beyond the truncation point -L:
// Gamma(H+1/2)^{-2} * int_L^inf ((t+x)^{H-1/2} - x^{H-1/2})^2 dx.
// t may be negative as long as t + L > 0.
inline double mvn_tail_variance(double t, double H, double L, double abs_tol = 1e-12) {
    check_hurst(H);
    if (!(L > 0.0)) throw validation_error("mvn_tail_variance: L must be > 0");
    if (t == 0.0 || H == 0.5) return 0.0;
    if (!(t + L > 0.0)) throw validation_error("mvn_tail_variance: need t + L > 0");
    const double e = H - 0.5;
    auto f = [&](double x) {
        const double d = stable_power_diff(e, x, t);
        return d * d;
    };
    const auto r = quad::integrate_power_tail(f, L, 3.0 - 2.0 * H, abs_tol);
    const double g = std::tgamma(H + 0.5);
    return quad::require(r, "mvn_tail_variance") / (g * g);
}

// Smallest truncation depth L (doubling then bisection) with tail variance
// <= tol at the signed time t for every supplied Hurst value.
inline double required_truncation(double t, std::span<const double> h_values, double tol,
                                  double l_max = 1e12) {
    if (!(tol > 0.0)) throw validation_error("required_truncation: tol must be > 0");
    double worst = 1.0;
    for (double H : h_values) {
        check_hurst(H);
        if (H == 0.5 || t == 0.0) continue;
        double lo = std::max(1.0, 1.5 * std::fabs(t) + 1.0);
        if (mvn_tail_variance(t, H, lo) <= tol) {
            worst = std::max(worst, lo);
            continue;
        }
        double hi = lo;
        while (mvn_tail_variance(t, H, hi) > tol) {
            hi *= 2.0;
            if (hi > l_max)
                throw numerical_error("required_truncation: no feasible L below " +
                                      std::to_string(l_max) + "; relax the tolerance");
        }
        lo = hi / 2.0;
        for (int it = 0; it < 40 && hi - lo > 1e-3 * lo; ++it) {
            const double mid = 0.5 * (lo + hi);
            (mvn_tail_variance(t, H, mid) > tol ? lo : hi) = mid;
        }
        worst = std::max(worst, hi);
    }
    return worst;
}

}  // namespace hurstlab::fbm
