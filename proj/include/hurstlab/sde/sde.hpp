#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "hurstlab/core/errors.hpp"
#include "hurstlab/core/rng.hpp"
#include "hurstlab/fbm/field.hpp"

namespace hurstlab::sde {

using fbm::FbmField;

// Drift with declared dissipativity and Lipschitz constants:
// <b(x)-b(y), x-y> <= -kappa |x-y|^2 and |b(x)-b(y)| <= K |x-y|.
struct DriftSpec {
    std::function<void(std::span<const double>, std::span<double>)> b;
    double kappa = 0.0;
    double lipschitz = 0.0;
    std::string id;

    void apply(std::span<const double> x, std::span<double> out) const { b(x, out); }
};

inline DriftSpec linear_drift(double lambda) {
    if (!(lambda > 0.0)) throw validation_error("linear_drift: lambda must be > 0");
    DriftSpec s;
    s.b = [lambda](std::span<const double> x, std::span<double> out) {
        for (std::size_t i = 0; i < x.size(); ++i) out[i] = -lambda * x[i];
    };
    s.kappa = lambda;
    s.lipschitz = lambda;
    s.id = "linear(" + std::to_string(lambda) + ")";
    return s;
}

// b(x) = -kappa0 x + c sin(x) componentwise; dissipative with kappa0 - c as
// long as c < kappa0.
inline DriftSpec sin_drift(double kappa0, double c) {
    if (!(kappa0 > 0.0 && c >= 0.0 && c < kappa0))
        throw validation_error("sin_drift: need kappa0 > 0 and 0 <= c < kappa0");
    DriftSpec s;
    s.b = [kappa0, c](std::span<const double> x, std::span<double> out) {
        for (std::size_t i = 0; i < x.size(); ++i) out[i] = -kappa0 * x[i] + c * std::sin(x[i]);
    };
    s.kappa = kappa0 - c;
    s.lipschitz = kappa0 + c;
    s.id = "sin(" + std::to_string(kappa0) + "," + std::to_string(c) + ")";
    return s;
}

// Largest gamma_0 in (0,1) with 0 < kappa x - 2 K^2 x^2 < 1 on (0, gamma_0).
// The upper branch never binds because kappa <= K.
inline double gamma0(const DriftSpec& spec) {
    if (!(spec.kappa > 0.0 && spec.lipschitz >= spec.kappa))
        throw validation_error("gamma0: need 0 < kappa <= K");
    return std::min(1.0, spec.kappa / (2.0 * spec.lipschitz * spec.lipschitz));
}

struct DriftValidationReport {
    double worst_dissipativity = 0.0;  // max of <db,dx>/|dx|^2, should be <= -kappa
    double worst_lipschitz = 0.0;      // max of |db|/|dx|, should be <= K
    std::size_t trials = 0;
    std::vector<double> witness_x, witness_y;
};

// Spot-checks the declared constants on random pairs inside a ball. Throws a
// validation error naming the witnessing pair when a declared constant is
// violated beyond 1e-9 relative slack.
inline DriftValidationReport validate_drift(const DriftSpec& spec, int dim, std::size_t trials,
                                            double radius, std::uint64_t seed) {
    if (trials < 1) throw validation_error("validate_drift: trials must be >= 1");
    if (dim < 1) throw validation_error("validate_drift: dim must be >= 1");
    rng::CounterRng gen(seed, 0x7a11da7e);
    DriftValidationReport report;
    report.trials = trials;
    report.worst_dissipativity = -HUGE_VAL;
    report.worst_lipschitz = 0.0;
    std::vector<double> x(static_cast<std::size_t>(dim)), y(static_cast<std::size_t>(dim));
    std::vector<double> bx(x.size()), by(y.size());
    std::uint64_t draw = 0;
    auto fail = [&](const std::string& what, double got, double declared) {
        std::string msg = "validate_drift: " + what + " violated (" + std::to_string(got) +
                          " vs declared " + std::to_string(declared) + ") at x=(";
        for (double v : x) msg += std::to_string(v) + ",";
        msg += ") y=(";
        for (double v : y) msg += std::to_string(v) + ",";
        msg += ")";
        throw validation_error(msg);
    };
    for (std::size_t trial = 0; trial < trials; ++trial) {
        for (auto& v : x) v = radius * (2.0 * gen.uniform(draw++) - 1.0);
        for (auto& v : y) v = radius * (2.0 * gen.uniform(draw++) - 1.0);
        double d2 = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) d2 += (x[i] - y[i]) * (x[i] - y[i]);
        if (d2 < 1e-24) continue;
        spec.apply(x, bx);
        spec.apply(y, by);
        double inner = 0.0, db2 = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            inner += (bx[i] - by[i]) * (x[i] - y[i]);
            db2 += (bx[i] - by[i]) * (bx[i] - by[i]);
        }
        const double diss = inner / d2;
        const double lip = std::sqrt(db2 / d2);
        if (diss > report.worst_dissipativity) {
            report.worst_dissipativity = diss;
            report.witness_x = x;
            report.witness_y = y;
        }
        report.worst_lipschitz = std::max(report.worst_lipschitz, lip);
        if (diss > -spec.kappa * (1.0 - 1e-9) + 1e-15) fail("dissipativity", diss, -spec.kappa);
        if (lip > spec.lipschitz * (1.0 + 1e-9)) fail("Lipschitz bound", lip, spec.lipschitz);
    }
    return report;
}

// Solution paths on a (time, Hurst, component) grid, same layout as FbmField.
struct PathSet {
    std::vector<double> t_grid;
    std::vector<double> h_grid;
    int dim = 1;
    std::vector<double> values;
    std::vector<std::string> warnings;

    std::size_t index(std::size_t it, std::size_t ih, int ic) const {
        return (it * h_grid.size() + ih) * static_cast<std::size_t>(dim) +
               static_cast<std::size_t>(ic);
    }
    double at(std::size_t it, std::size_t ih, int ic = 0) const { return values[index(it, ih, ic)]; }
    double& at(std::size_t it, std::size_t ih, int ic = 0) { return values[index(it, ih, ic)]; }

    // contiguous (time, component) series for one Hurst value
    std::vector<double> series(std::size_t ih) const {
        std::vector<double> out(t_grid.size() * static_cast<std::size_t>(dim));
        for (std::size_t it = 0; it < t_grid.size(); ++it)
            for (int c = 0; c < dim; ++c)
                out[it * static_cast<std::size_t>(dim) + static_cast<std::size_t>(c)] =
                    at(it, ih, c);
        return out;
    }
};

// Fine-Euler reference solution of the random ODE dY = b(Y) dt + dB, stepped
// on the field grid itself (the field step is the fine step delta).
inline PathSet solve_reference(const FbmField& field, const DriftSpec& spec,
                               std::span<const double> y0, bool strict = false) {
    if (field.t_grid.size() < 2) throw validation_error("solve_reference: need >= 2 time points");
    if (y0.size() != static_cast<std::size_t>(field.dim))
        throw validation_error("solve_reference: initial point dimension mismatch");
    const double delta = field.t_grid[1] - field.t_grid[0];
    PathSet path;
    path.t_grid = field.t_grid;
    path.h_grid = field.h_grid;
    path.dim = field.dim;
    path.values.assign(field.values.size(), 0.0);
    if (delta * spec.lipschitz >= 0.5) {
        const std::string w = "solve_reference: delta*K = " +
                              std::to_string(delta * spec.lipschitz) +
                              " >= 0.5; refine the field grid";
        if (strict) throw validation_error(w);
        path.warnings.push_back(w);
    }
    std::vector<double> y(y0.begin(), y0.end()), byv(y.size());
    for (std::size_t ih = 0; ih < field.h_grid.size(); ++ih) {
        std::copy(y0.begin(), y0.end(), y.begin());
        for (int c = 0; c < field.dim; ++c) path.at(0, ih, c) = y[static_cast<std::size_t>(c)];
        for (std::size_t k = 0; k + 1 < field.t_grid.size(); ++k) {
            spec.apply(y, byv);
            for (int c = 0; c < field.dim; ++c) {
                const auto ci = static_cast<std::size_t>(c);
                y[ci] += delta * byv[ci] + (field.at(k + 1, ih, c) - field.at(k, ih, c));
                path.at(k + 1, ih, c) = y[ci];
            }
        }
    }
    return path;
}

// Euler scheme M_{(k+1)g} = M_{kg} + g b(M_{kg}) + (B_{(k+1)g} - B_{kg}) for
// k = 0..N-1. The field must contain the times {k gamma}.
inline PathSet euler_scheme(const FbmField& field, const DriftSpec& spec,
                            std::span<const double> m0, double gamma, std::size_t steps) {
    if (m0.size() != static_cast<std::size_t>(field.dim))
        throw validation_error("euler_scheme: initial point dimension mismatch");
    const double g0 = gamma0(spec);
    if (!(gamma > 0.0 && gamma < g0))
        throw validation_error("euler_scheme: gamma = " + std::to_string(gamma) +
                               " violates the step condition gamma < gamma_0 = " +
                               std::to_string(g0) +
                               " (largest step with 0 < kappa*g - 2K^2 g^2 < 1)");
    if (field.t_grid.size() < 2) throw validation_error("euler_scheme: need >= 2 field times");
    const double dt = field.t_grid[1] - field.t_grid[0];
    const double ratio = gamma / dt;
    const auto stride = static_cast<std::size_t>(std::llround(ratio));
    if (stride < 1 || std::fabs(ratio - static_cast<double>(stride)) > 1e-9)
        throw validation_error("euler_scheme: gamma must be a multiple of the field step");
    if (steps * stride + 1 > field.t_grid.size())
        throw validation_error("euler_scheme: field does not cover N steps");
    if (std::fabs(field.t_grid[0]) > 1e-12)
        throw validation_error("euler_scheme: field must start at t = 0");

    PathSet path;
    path.t_grid.resize(steps + 1);
    for (std::size_t k = 0; k <= steps; ++k) path.t_grid[k] = static_cast<double>(k) * gamma;
    path.h_grid = field.h_grid;
    path.dim = field.dim;
    path.values.assign((steps + 1) * field.h_grid.size() * static_cast<std::size_t>(field.dim), 0.0);

    std::vector<double> m(m0.begin(), m0.end()), bm(m.size());
    for (std::size_t ih = 0; ih < field.h_grid.size(); ++ih) {
        std::copy(m0.begin(), m0.end(), m.begin());
        for (int c = 0; c < field.dim; ++c) path.at(0, ih, c) = m[static_cast<std::size_t>(c)];
        for (std::size_t k = 0; k < steps; ++k) {
            spec.apply(m, bm);
            for (int c = 0; c < field.dim; ++c) {
                const auto ci = static_cast<std::size_t>(c);
                const double db =
                    field.at((k + 1) * stride, ih, c) - field.at(k * stride, ih, c);
                m[ci] += gamma * bm[ci] + db;
                path.at(k + 1, ih, c) = m[ci];
            }
        }
    }
    return path;
}

enum class ErgodicMode { continuous, discrete };

struct ErgodicMeanSeries {
    std::vector<double> times;
    std::vector<double> values;
    double centering = 0.0;
    ErgodicMode mode = ErgodicMode::continuous;
};

// Running mean square difference of two (time, component) series on a shared
// grid.
//  continuous: V(t) = (1/(t+1)) int_0^{t+1} |a_s - b_s|^2 ds  (trapezoid),
//              reported for grid times with t+1 inside the horizon;
//  discrete:   V(t_k) = (1/k) sum_{j=1..k} |a_j - b_j|^2.
// An optional centering constant is subtracted from every value.
inline ErgodicMeanSeries ergodic_mean_sq_diff(std::span<const double> times,
                                              std::span<const double> a, std::span<const double> b,
                                              int dim, ErgodicMode mode, double centering = 0.0) {
    const std::size_t nt = times.size();
    if (nt < 2) throw validation_error("ergodic_mean_sq_diff: need >= 2 times");
    const auto d = static_cast<std::size_t>(dim);
    if (a.size() != nt * d || b.size() != nt * d)
        throw validation_error("ergodic_mean_sq_diff: series/grid size mismatch");
    std::vector<double> f(nt);
    for (std::size_t k = 0; k < nt; ++k) {
        double s = 0.0;
        for (std::size_t c = 0; c < d; ++c) {
            const double diff = a[k * d + c] - b[k * d + c];
            s += diff * diff;
        }
        f[k] = s;
    }
    ErgodicMeanSeries out;
    out.centering = centering;
    out.mode = mode;
    if (mode == ErgodicMode::discrete) {
        double acc = 0.0;
        for (std::size_t k = 1; k < nt; ++k) {
            acc += f[k];
            out.times.push_back(times[k]);
            out.values.push_back(acc / static_cast<double>(k) - centering);
        }
        return out;
    }
    if (std::fabs(times[0]) > 1e-12)
        throw validation_error("ergodic_mean_sq_diff: continuous mode expects the grid to start at 0");
    // cumulative trapezoid; I is piecewise quadratic, evaluated exactly at t+1
    std::vector<double> cum(nt, 0.0);
    for (std::size_t k = 0; k + 1 < nt; ++k)
        cum[k + 1] = cum[k] + 0.5 * (f[k] + f[k + 1]) * (times[k + 1] - times[k]);
    auto eval_cum = [&](double tau) {
        const auto it = std::upper_bound(times.begin(), times.end(), tau);
        std::size_t k = (it == times.begin()) ? 0 : static_cast<std::size_t>(it - times.begin()) - 1;
        k = std::min(k, nt - 2);
        const double h = times[k + 1] - times[k];
        const double x = tau - times[k];
        const double slope = (f[k + 1] - f[k]) / h;
        return cum[k] + f[k] * x + 0.5 * slope * x * x;
    };
    const double t_end = times[nt - 1];
    for (std::size_t k = 0; k < nt; ++k) {
        const double t = times[k];
        if (t + 1.0 > t_end + 1e-12) break;
        out.times.push_back(t);
        out.values.push_back(eval_cum(t + 1.0) / (t + 1.0) - centering);
    }
    if (out.times.empty())
        throw validation_error("ergodic_mean_sq_diff: horizon too short for the (t+1) window");
    return out;
}

}  // namespace hurstlab::sde
