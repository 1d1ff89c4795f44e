#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <mutex>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "hurstlab/core/errors.hpp"
#include "hurstlab/core/interp.hpp"
#include "hurstlab/core/quadrature.hpp"
#include "hurstlab/fbm/covariance.hpp"
#include "hurstlab/fbm/field.hpp"

namespace hurstlab::fou {

using fbm::CovarianceModel;
using fbm::FbmField;
using fbm::Normalization;

// Stationary fractional Ornstein-Uhlenbeck path(s), one per Hurst value of the
// driving field realization.
struct FouPath {
    std::vector<double> t_grid;
    std::vector<double> h_grid;
    int dim = 1;
    bool stationary_init = true;
    std::uint64_t seed = 0;
    double truncation_depth = 0.0;  // L: integration started at t = -L

    std::vector<double> values;  // layout (t, h, component)

    std::size_t index(std::size_t it, std::size_t ih, int ic) const {
        return (it * h_grid.size() + ih) * static_cast<std::size_t>(dim) +
               static_cast<std::size_t>(ic);
    }
    double at(std::size_t it, std::size_t ih, int ic = 0) const { return values[index(it, ih, ic)]; }
    double& at(std::size_t it, std::size_t ih, int ic = 0) { return values[index(it, ih, ic)]; }
};

// Depth L with e^{-L} (1+L)^{h_max} <= tol, the stationarity truncation budget.
inline double required_negative_extension(double h_max, double tol) {
    if (!(tol > 0.0)) throw validation_error("required_negative_extension: tol must be > 0");
    double L = 1.0;
    while (std::exp(-L) * std::pow(1.0 + L, h_max) > tol) {
        L += 1.0;
        if (L > 800.0) throw numerical_error("required_negative_extension: tolerance unreachable");
    }
    return L;
}

namespace detail {

inline void check_uniform(const std::vector<double>& t) {
    if (t.size() < 2) throw validation_error("fou: field needs at least two time points");
    const double dt = t[1] - t[0];
    for (std::size_t i = 1; i + 1 < t.size(); ++i)
        if (std::fabs(t[i + 1] - t[i] - dt) > 1e-9 * std::max(1.0, dt))
            throw validation_error("fou: field time grid must be uniform");
}

}  // namespace detail

// Stationary fOU driven by the field realization: Riemann-Stieltjes sums of
// e^{-(t-s)} dB_s over the field grid, all Hurst values at once. The field
// must extend to negative times; integration starts with value 0 at the first
// grid point, so the truncation error is of order e^{-(t+L)} |B|.
inline FouPath sample_fou(const FbmField& field, double out_start = 0.0, double tol = 1e-9) {
    detail::check_uniform(field.t_grid);
    const double L = -field.t_grid.front();
    if (L <= 0.0) throw validation_error("sample_fou: field must start at a negative time");
    const double h_max = field.h_grid.back();
    const double required = required_negative_extension(h_max, tol);
    if (L < required)
        throw validation_error("sample_fou: insufficient negative extension, required L >= " +
                               std::to_string(required) + ", field has " + std::to_string(L));

    const double dt = field.t_grid[1] - field.t_grid[0];
    const double decay = std::exp(-dt);
    const double cell_avg = (1.0 - decay) / dt;  // exact cell average of e^{-(t-s)}

    FouPath path;
    path.h_grid = field.h_grid;
    path.dim = field.dim;
    path.seed = field.seed;
    path.truncation_depth = L;
    for (double t : field.t_grid)
        if (t >= out_start - 1e-12) path.t_grid.push_back(t);
    path.values.assign(path.t_grid.size() * path.h_grid.size() * static_cast<std::size_t>(field.dim),
                       0.0);

    const std::size_t first_out =
        field.t_grid.size() - path.t_grid.size();  // grid index of first output
    for (std::size_t ih = 0; ih < field.h_grid.size(); ++ih) {
        for (int c = 0; c < field.dim; ++c) {
            double u = 0.0;
            if (first_out == 0) path.at(0, ih, c) = u;
            for (std::size_t k = 0; k + 1 < field.t_grid.size(); ++k) {
                const double db = field.at(k + 1, ih, c) - field.at(k, ih, c);
                u = decay * u + cell_avg * db;
                if (k + 1 >= first_out) path.at(k + 1 - first_out, ih, c) = u;
            }
        }
    }
    return path;
}

// Ornstein-Uhlenbeck path from a given starting point (same recursion, no
// stationarity): U_t = e^{-t} U_0 + int_0^t e^{-(t-s)} dB_s.
inline FouPath sample_ou(const FbmField& field, std::span<const double> u0) {
    detail::check_uniform(field.t_grid);
    if (u0.size() != static_cast<std::size_t>(field.dim))
        throw validation_error("sample_ou: initial point dimension mismatch");
    FouPath path;
    path.t_grid = field.t_grid;
    path.h_grid = field.h_grid;
    path.dim = field.dim;
    path.stationary_init = false;
    path.seed = field.seed;
    const double dt = field.t_grid[1] - field.t_grid[0];
    const double decay = std::exp(-dt);
    const double cell_avg = (1.0 - decay) / dt;
    path.values.assign(field.values.size(), 0.0);
    for (std::size_t ih = 0; ih < field.h_grid.size(); ++ih) {
        for (int c = 0; c < field.dim; ++c) {
            double u = u0[static_cast<std::size_t>(c)];
            path.at(0, ih, c) = u;
            for (std::size_t k = 0; k + 1 < field.t_grid.size(); ++k) {
                const double db = field.at(k + 1, ih, c) - field.at(k, ih, c);
                u = decay * u + cell_avg * db;
                path.at(k + 1, ih, c) = u;
            }
        }
    }
    return path;
}

// ---------------------------------------------------------------------------
// Stationary covariances r_{H,K}(s) = E[ U^H_0 U^K_s ] per component.
//
// The symmetrized quantity reduces to one-dimensional integrals: with
// lambda = H+K and rho = E B_1^H B_1^K,
//   r_sym(s) = e^{-s} rho Gamma(lambda+1)
//            + rho lambda (lambda-1) [ int_0^s e^{-x} psi(s-x) dx
//              + (1-e^{-2s})/2 int_0^inf e^{-y} (s+y)^{lambda-2} dy ],
//   psi(w) = w^{lambda-2} (1-e^{-2w})/2,
// obtained from the integration-by-parts representation and the fact that the
// mixed second derivative of the symmetrized field covariance is
// rho lambda (lambda-1) (v-u)^{lambda-2}.
//
// The unsymmetrized covariance has no such reduction and is computed by
// nested quadrature over E[U_0 U_s] = -int e^{-x} C(-x,s) dx
// + int int e^{-x-y} C(-x,s-y), with the antisymmetric part of C memoized on
// a cross-section grid and interpolated (monotone cubic).
// ---------------------------------------------------------------------------
class FouCovariance {
public:
    explicit FouCovariance(const CovarianceModel& model, double tol = 1e-8,
                           double tail_weight_tol = 1e-10)
        : model_(model), tol_(tol), cutoff_(-std::log(tail_weight_tol)) {}

    // Reported accuracy of the unsymmetrized route (quadrature + interpolation).
    double unsym_tolerance() const { return 50.0 * tol_ + 1e-6; }

    double rho(double H, double K, Normalization mode) const { return model_.rho(H, K, mode); }

    // E[U_0^H U_s^K + U_s^H U_0^K], per component.
    double symmetrized(double H, double K, double s,
                       Normalization mode = Normalization::unit_variance) const {
        if (!(s >= 0.0)) throw validation_error("FouCovariance: lag must be >= 0");
        const double lambda = H + K;
        const double r = model_.rho(H, K, mode);
        const double lead = std::exp(-s) * r * std::tgamma(lambda + 1.0);
        if (s == 0.0 || lambda == 1.0) return lead;

        auto psi = [lambda](double w) {
            return std::pow(w, lambda - 2.0) * (1.0 - std::exp(-2.0 * w)) * 0.5;
        };
        // int_0^s e^{-x} psi(s-x) dx, integrated in w = s - x so the w -> 0
        // singularity sees the exact distance
        quad::Result near;
        if (s <= cutoff_) {
            near = quad::integrate_endpoint_power(
                [&](double w) { return std::exp(w - s) * psi(w); }, 0.0, s, lambda - 1.0, 0.0,
                tol_);
        } else {
            near = quad::integrate([&](double w) { return std::exp(w - s) * psi(w); }, s - cutoff_,
                                   s, tol_);
        }
        const auto far = quad::integrate_endpoint_power(
            [&](double y) { return std::exp(-y) * std::pow(s + y, lambda - 2.0); }, 0.0, cutoff_,
            std::max(lambda - 2.0, -0.9), 0.0, tol_);
        const double bracket = quad::require(near, "fou symmetrized covariance") +
                               0.5 * (1.0 - std::exp(-2.0 * s)) *
                                   quad::require(far, "fou symmetrized covariance");
        return lead + r * lambda * (lambda - 1.0) * bracket;
    }

    // E[U_0^H U_s^K], per component (order matters for H != K).
    double stationary_cross_covariance(double H, double K, double s,
                                       Normalization mode = Normalization::unit_variance) const {
        if (!(s >= 0.0)) throw validation_error("FouCovariance: lag must be >= 0");
        if (H == K) return 0.5 * symmetrized(H, K, s, mode);
        const Section& sec = section(H, K, mode);
        auto inner = [&](double y) {
            const double v = s - y;
            return integrate_in_x(sec, v);
        };
        // outer integral in y, split at the kink y = s
        const double split = std::min(s, cutoff_);
        double total = 0.0;
        if (split > 0.0) {
            const auto r1 = quad::integrate_endpoint_power(
                [&](double y) { return std::exp(-y) * inner(y); }, 0.0, split, 0.0,
                std::min(sec.lambda, 1.0), tol_);
            total += quad::require(r1, "fou cross covariance (outer)");
        }
        if (split < cutoff_) {
            const auto r2 = quad::integrate_endpoint_power(
                [&](double y) { return std::exp(-y) * inner(y); }, split, cutoff_,
                std::min(sec.lambda, 1.0), 0.0, tol_);
            total += quad::require(r2, "fou cross covariance (outer)");
        }
        return total - integrate_in_x(sec, s);
    }

    // Stationary variance E (U_0^H)^2 per component.
    double stationary_variance(double H, Normalization mode = Normalization::unit_variance) const {
        return 0.5 * symmetrized(H, H, 0.0, mode);
    }

    // Centering constant E |U_0^H - U_0^K|^2 per component.
    double mean_sq_diff0(double H, double K,
                         Normalization mode = Normalization::unit_variance) const {
        return stationary_variance(H, mode) + stationary_variance(K, mode) -
               symmetrized(H, K, 0.0, mode);
    }

    struct DecayPoint {
        double s;
        double r_sym_abs;
        double envelope;  // 1 ∧ s^{2 h_max - 2}
    };
    struct DecayProfile {
        std::vector<DecayPoint> points;
        double h_max = 0.0;
        double c_hat = 0.0;  // max over s <= 1 of |r_sym| / envelope
    };

    // |r_sym| against the decay envelope, with the calibrated constant anchored
    // on s <= 1 where the envelope is the constant branch.
    DecayProfile decay_profile(double H, double K, std::span<const double> s_grid,
                               double h_max = 0.0,
                               Normalization mode = Normalization::unit_variance) const {
        if (h_max <= 0.0) h_max = std::max(H, K);
        DecayProfile profile;
        profile.h_max = h_max;
        double c_hat = 0.0;
        bool have_small_s = false;
        double prev = -1.0;
        for (double s : s_grid) {
            if (s < 0.0 || s <= prev)
                throw validation_error("decay_profile: s grid must be ascending and >= 0");
            prev = s;
            const double r = std::fabs(symmetrized(H, K, s, mode));
            const double env = (s <= 1.0) ? 1.0 : std::pow(s, 2.0 * h_max - 2.0);
            profile.points.push_back({s, r, env});
            if (s <= 1.0) {
                c_hat = std::max(c_hat, r);
                have_small_s = true;
            }
        }
        if (!have_small_s) c_hat = std::fabs(symmetrized(H, K, 1.0, mode));
        profile.c_hat = c_hat;
        return profile;
    }

private:
    // Antisymmetric part D(u,v) = C_HK(u,v) - C_KH(u,v) on the cross-section
    // u = -(1-|zeta|), v = zeta; D is homogeneous of degree lambda, so one
    // section determines it on the whole half-plane u < 0.
    struct Section {
        double H, K, lambda, rho;
        Normalization mode;
        interp::Pchip g_neg_far;   // zeta in [-1, -1/2]
        interp::Pchip g_neg_near;  // zeta in [-1/2, 0]
        interp::Pchip g_pos;       // zeta in [0, 1]

        double g(double zeta) const {
            if (zeta <= -0.5) return g_neg_far(zeta);
            if (zeta <= 0.0) return g_neg_near(zeta);
            return g_pos(zeta);
        }
        // D(-x, v) for x > 0
        double antisym(double x, double v) const {
            const double scale = x + std::fabs(v);
            if (scale == 0.0) return 0.0;
            return std::pow(scale, lambda) * g(v / scale);
        }
        double sym(double x, double v) const {  // S(-x, v) closed form
            return rho * (std::pow(x, lambda) + std::pow(std::fabs(v), lambda) -
                          std::pow(x + std::fabs(v), lambda) * (v >= 0.0 ? 1.0 : 0.0) -
                          (v < 0.0 ? std::pow(std::fabs(v - (-x)), lambda) : 0.0));
        }
        double cov(double x, double v) const {  // C_HK(-x, v)
            return 0.5 * (sym(x, v) + antisym(x, v));
        }
    };

    const Section& section(double H, double K, Normalization mode) const {
        const auto key = std::make_tuple(H, K, mode == Normalization::unit_variance);
        {
            std::lock_guard lock(mutex_);
            if (auto it = sections_.find(key); it != sections_.end()) return it->second;
        }
        Section sec;
        sec.H = H;
        sec.K = K;
        sec.lambda = H + K;
        sec.rho = model_.rho(H, K, mode);
        sec.mode = mode;
        auto d_of = [&](double zeta) {
            const double u = -(1.0 - std::fabs(zeta));
            if (u == 0.0 || zeta == 0.0) return 0.0;
            return model_.cross(u, H, zeta, K, mode) - model_.cross(u, K, zeta, H, mode);
        };
        auto build = [&](double lo, double hi, int n) {
            std::vector<double> xs(static_cast<std::size_t>(n)), ys(static_cast<std::size_t>(n));
            for (int i = 0; i < n; ++i) {
                const double z = lo + (hi - lo) * static_cast<double>(i) / (n - 1);
                xs[static_cast<std::size_t>(i)] = z;
                ys[static_cast<std::size_t>(i)] = d_of(z);
            }
            return interp::Pchip(std::move(xs), std::move(ys));
        };
        sec.g_neg_far = build(-1.0, -0.5, 65);
        sec.g_neg_near = build(-0.5, 0.0, 65);
        sec.g_pos = build(0.0, 1.0, 129);
        std::lock_guard lock(mutex_);
        return sections_.emplace(key, std::move(sec)).first->second;
    }

    // int_0^cutoff e^{-x} C_HK(-x, v) dx with a split at the diagonal x = -v.
    double integrate_in_x(const Section& sec, double v) const {
        auto f = [&](double x) { return std::exp(-x) * sec.cov(x, v); };
        const double alpha0 = std::min(sec.lambda, 1.0);
        if (v < 0.0 && -v < cutoff_) {
            const auto a = quad::integrate_endpoint_power(f, 0.0, -v, alpha0,
                                                          std::min(sec.lambda, 1.0), tol_);
            const auto b = quad::integrate_endpoint_power(f, -v, cutoff_,
                                                          std::min(sec.lambda, 1.0), 0.0, tol_);
            return quad::require(a, "fou cross covariance (inner)") +
                   quad::require(b, "fou cross covariance (inner)");
        }
        const auto r = quad::integrate_endpoint_power(f, 0.0, cutoff_, alpha0, 0.0, tol_);
        return quad::require(r, "fou cross covariance (inner)");
    }

    const CovarianceModel& model_;
    double tol_;
    double cutoff_;
    mutable std::mutex mutex_;
    mutable std::map<std::tuple<double, double, bool>, Section> sections_;
};

}  // namespace hurstlab::fou
