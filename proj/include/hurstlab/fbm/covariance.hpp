#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <mutex>
#include <unordered_map>
#include <vector>

#include "hurstlab/core/errors.hpp"
#include "hurstlab/core/quadrature.hpp"
#include "hurstlab/fbm/kernels.hpp"

namespace hurstlab::fbm {

enum class Normalization { raw, unit_variance };

// Cross-covariances of the (time, Hurst) Gaussian field computed as L2 inner
// products of the moving-average kernels. All quadratures carry an absolute
// tolerance; values are cached under keys rounded to 1e-12.
//
// Modes: `raw` is the plain kernel isometry with the 1/Gamma(H+1/2) constant;
// `unit_variance` divides by c(H) c(K) so that E (B_1^H)^2 = 1 and increments
// at equal Hurst satisfy E (B_t - B_s)^2 = |t-s|^{2H}.
class CovarianceModel {
public:
    explicit CovarianceModel(double abs_tol = 1e-8) : tol_(abs_tol) {
        if (!(abs_tol > 0.0)) throw validation_error("CovarianceModel: tolerance must be > 0");
    }

    double tolerance() const { return tol_; }

    // c(H) = sqrt of the raw variance of B_1^H.
    double normalization(double H) const {
        check_hurst(H);
        const std::int64_t key = round_key(H);
        {
            std::lock_guard lock(mutex_);
            if (auto it = norm_cache_.find(key); it != norm_cache_.end()) return it->second;
        }
        const double c = std::sqrt(cross_raw(1.0, H, 1.0, H));
        std::lock_guard lock(mutex_);
        norm_cache_.emplace(key, c);
        return c;
    }

    // E B_1^H B_1^K.
    double rho(double H, double K, Normalization mode = Normalization::unit_variance) const {
        return cross(1.0, H, 1.0, K, mode);
    }

    // E B_u^H B_v^K; u and v may be negative.
    double cross(double u, double H, double v, double K,
                 Normalization mode = Normalization::unit_variance) const {
        check_hurst(H);
        check_hurst(K);
        double value = cross_raw(u, H, v, K);
        if (mode == Normalization::unit_variance) value /= normalization(H) * normalization(K);
        return value;
    }

    // E (B_t^H - B_{t2}^{H2})^2.
    double increment_second_moment(double t, double H, double t2, double H2,
                                   Normalization mode = Normalization::unit_variance) const {
        return cross(t, H, t, H, mode) - 2.0 * cross(t, H, t2, H2, mode) +
               cross(t2, H2, t2, H2, mode);
    }

    // E (B_t^H - B_{t2}^H - B_t^{H2} + B_{t2}^{H2})^2 via the four-point expansion.
    double rectangular_increment_second_moment(double t, double t2, double H, double H2,
                                               Normalization mode = Normalization::unit_variance) const {
        if (t == t2 || H == H2) return 0.0;
        const std::array<std::pair<double, double>, 4> pts = {
            std::pair{t, H}, {t2, H}, {t, H2}, {t2, H2}};
        const std::array<double, 4> sign = {1.0, -1.0, -1.0, 1.0};
        double sum = 0.0;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                sum += sign[i] * sign[j] *
                       cross(pts[i].first, pts[i].second, pts[j].first, pts[j].second, mode);
        return sum;
    }

    // Covariance of the shifted increments (B_{t+s}^H - B_s^H, B_{t'+s}^K - B_s^K).
    double shifted_increment_covariance(double t, double H, double tp, double K, double s,
                                        Normalization mode = Normalization::unit_variance) const {
        return cross(t + s, H, tp + s, K, mode) - cross(t + s, H, s, K, mode) -
               cross(s, H, tp + s, K, mode) + cross(s, H, s, K, mode);
    }

    std::size_t cache_size() const { return cache_.size(); }

private:
    static std::int64_t round_key(double x) {
        const double scaled = x * 1e12;
        if (std::fabs(scaled) > 9.0e18) throw validation_error("covariance cache key overflow");
        return static_cast<std::int64_t>(std::llround(scaled));
    }

    struct Key {
        std::int64_t u, h, v, k;
        bool operator==(const Key&) const = default;
    };
    struct KeyHash {
        std::size_t operator()(const Key& q) const {
            std::uint64_t h = 1469598103934665603ull;
            for (std::int64_t w : {q.u, q.h, q.v, q.k}) {
                h ^= static_cast<std::uint64_t>(w);
                h *= 1099511628211ull;
            }
            return static_cast<std::size_t>(h);
        }
    };

    double cross_raw(double u, double H, double v, double K) const {
        if (u == 0.0 || v == 0.0) return 0.0;
        // symmetry C(u,H,v,K) = C(v,K,u,H): canonical order
        if (std::tie(u, H) > std::tie(v, K)) {
            std::swap(u, v);
            std::swap(H, K);
        }
        const Key key{round_key(u), round_key(H), round_key(v), round_key(K)};
        {
            std::lock_guard lock(mutex_);
            if (auto it = cache_.find(key); it != cache_.end()) return it->second;
        }
        const double value = integrate_kernel_product(u, H, v, K);
        std::lock_guard lock(mutex_);
        cache_.emplace(key, value);
        return value;
    }

    // Integrand endpoint exponent guard when approaching breakpoint `b` from
    // the left: the most singular power present in the kernel product there.
    static double left_exponent(double b, double u, double H, double v, double K) {
        double e = 2.0;  // "smooth" sentinel handled by substitution_order
        if (b == u && b == v) e = std::min(e, H + K - 1.0);
        else if (b == u) e = std::min(e, H - 0.5);
        else if (b == v) e = std::min(e, K - 0.5);
        if (b == 0.0) e = std::min({e, H - 0.5, K - 0.5, H + K - 1.0});
        return e;
    }

    // Kernel value at s = anchor - d evaluated in distance coordinates, so a
    // power factor vanishing at the anchor sees the exact distance d instead
    // of a cancelling subtraction.
    static double kernel_at_distance(double t, double H, double anchor, double d) {
        const double e = H - 0.5;
        const double ts = (t - anchor) + d;   // t - s
        const double ms = d - anchor;         // -s
        if (ms <= 0.0) return (ts > 0.0) ? std::pow(ts, e) : 0.0;
        if (ts <= 0.0) return -std::pow(ms, e);
        return stable_power_diff(e, ms, t);   // ts = ms + t, both branches active
    }

    double integrate_kernel_product(double u, double H, double v, double K) const {
        const double support_end = std::min(std::max(u, 0.0), std::max(v, 0.0));
        std::vector<double> pts;
        for (double p : {u, v, 0.0, support_end})
            if (p <= support_end) pts.push_back(p);
        std::sort(pts.begin(), pts.end());
        pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

        const double seg_tol = tol_ / static_cast<double>(pts.size() + 1);
        double total = 0.0, err = 0.0;
        bool ok = true;

        // finite segments, integrated in the distance d to the right endpoint
        // where the kernels may be singular
        for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
            const double b = pts[i + 1];
            auto g = [&](double d) {
                return kernel_at_distance(u, H, b, d) * kernel_at_distance(v, K, b, d);
            };
            const double alpha = left_exponent(b, u, H, v, K);
            const auto r =
                quad::integrate_endpoint_power(g, 0.0, b - pts[i], alpha, 0.0, seg_tol);
            total += r.value;
            err += r.error;
            ok = ok && r.converged;
        }

        // tail (-inf, first breakpoint]: distance variable d = pts[0] - s
        {
            const double p0 = pts.front();
            auto g = [&](double d) {
                return kernel_at_distance(u, H, p0, d) * kernel_at_distance(v, K, p0, d);
            };
            const double alpha = left_exponent(p0, u, H, v, K);
            const double y_split = 2.0 * std::max({std::fabs(u), std::fabs(v), 1.0});
            const auto near =
                quad::integrate_endpoint_power(g, 0.0, y_split, alpha, 0.0, seg_tol);
            const auto far = quad::integrate_power_tail(g, y_split, 3.0 - H - K, seg_tol);
            total += near.value + far.value;
            err += near.error + far.error;
            ok = ok && near.converged && far.converged;
        }

        if (!ok)
            throw numerical_error("cross covariance quadrature did not converge; achieved " +
                                  std::to_string(err) + " (requested " + std::to_string(tol_) + ")");
        const double g = std::tgamma(H + 0.5) * std::tgamma(K + 0.5);
        return total / g;
    }

    double tol_;
    mutable std::mutex mutex_;
    mutable std::unordered_map<Key, double, KeyHash> cache_;
    mutable std::unordered_map<std::int64_t, double> norm_cache_;
};

}  // namespace hurstlab::fbm
