#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "hurstlab/core/parallel.hpp"
#include "hurstlab/core/rng.hpp"
#include "hurstlab/core/stats.hpp"
#include "hurstlab/fbm/sampler.hpp"
#include "hurstlab/fou/fou.hpp"
#include "hurstlab/sde/sde.hpp"

namespace hurstlab::regcheck {

using fbm::CovarianceModel;
using fbm::Normalization;

// ---------------------------------------------------------------------------
// Report types. Verdicts are pure functions of the recorded numbers and the
// declared rule, so each report can be re-checked from its own contents.
// ---------------------------------------------------------------------------

struct RatioPoint {
    std::map<std::string, double> coords;
    double statistic = 0.0;
    double bound = 0.0;  // bound expression value (without the constant)
    double ratio = 0.0;  // statistic / bound, 0 when both vanish
    double se = 0.0;     // standard error of the ratio; 0 for quadrature points
};

struct BoundCheckReport {
    std::string id;
    std::string rule;
    std::vector<RatioPoint> points;
    std::size_t reference = 0;  // index anchoring the calibrated constant
    double c_hat = 0.0;
    double factor = 10.0;
    bool pass = false;
};

// max over points of (ratio - 3 se) <= factor * c_hat
inline bool recompute_verdict(const BoundCheckReport& r) {
    const double threshold = r.factor * r.c_hat;
    for (const auto& p : r.points)
        if (p.ratio - 3.0 * p.se > threshold * (1.0 + 1e-12) + 1e-300) return false;
    return true;
}

struct HolderRegression {
    std::vector<double> lags;
    std::vector<double> moments;
    double slope = 0.0;
    double slope_se = 0.0;
    double intercept = 0.0;
    std::vector<double> residuals;
};

struct QuantileStabilityReport {
    std::string id;
    std::string rule;
    double horizon1 = 0.0, horizon2 = 0.0;
    std::vector<double> probs;
    std::vector<double> quantiles1, quantiles2;
    std::vector<double> sample1, sample2;  // per-seed constants
    double drift = 0.0;                    // relative change of the 0.9-quantile
    bool pass = false;
};

struct ErgodicRegularityReport {
    std::string id;
    std::string rule;
    double beta = 0.9;
    double safety = 2.0;
    double min_fraction = 0.9;
    std::vector<double> deltas;
    std::vector<std::vector<double>> r_values;  // [delta][seed]
    std::vector<double> pass_fraction;          // per consecutive delta pair
    bool pass = false;
};

struct VDecayReport {
    std::string id;
    std::string rule;
    HolderRegression regression;  // log E|V|^{2p} against log(t+1)
    double threshold = 0.0;       // slope must be <= threshold
    bool pass = false;
};

namespace detail {

inline double se_of_mean(std::span<const double> x) {
    return x.size() > 1 ? stats::standard_error(x) : 0.0;
}

inline std::size_t closest_index(const std::vector<RatioPoint>& pts, const std::string& key,
                                 double target) {
    std::size_t best = 0;
    double best_d = HUGE_VAL;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const auto it = pts[i].coords.find(key);
        if (it == pts[i].coords.end()) continue;
        const double d = std::fabs(it->second - target);
        if (d < best_d && pts[i].ratio > 0.0) {
            best_d = d;
            best = i;
        }
    }
    return best;
}

inline void finalize(BoundCheckReport& r, const std::string& anchor_key, double anchor_target) {
    r.reference = closest_index(r.points, anchor_key, anchor_target);
    r.c_hat = r.points.empty() ? 0.0 : r.points[r.reference].ratio;
    r.pass = recompute_verdict(r);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Time-direction Hoelder exponent: log-log regression of increment second
// moments; the expected slope is 2H.
// ---------------------------------------------------------------------------

inline HolderRegression holder_regression(std::span<const double> lags,
                                          std::span<const double> moments) {
    if (lags.size() != moments.size() || lags.size() < 2)
        throw validation_error("holder_regression: need matched lags/moments");
    std::vector<double> lx(lags.size()), ly(lags.size());
    for (std::size_t i = 0; i < lags.size(); ++i) {
        if (!(lags[i] > 0.0 && moments[i] > 0.0))
            throw validation_error("holder_regression: lags and moments must be positive");
        lx[i] = std::log(lags[i]);
        ly[i] = std::log(moments[i]);
    }
    const auto fit = stats::ols(lx, ly);
    HolderRegression out;
    out.lags.assign(lags.begin(), lags.end());
    out.moments.assign(moments.begin(), moments.end());
    out.slope = fit.slope;
    out.slope_se = fit.slope_se;
    out.intercept = fit.intercept;
    out.residuals = fit.residuals;
    return out;
}

inline HolderRegression holder_time_exponent(const CovarianceModel& model, double H,
                                             std::span<const double> lags, std::size_t paths,
                                             std::uint64_t seed, int threads = 1) {
    if (lags.size() < 4) throw validation_error("holder_time_exponent: need >= 4 lags");
    double lo = HUGE_VAL, hi = 0.0;
    for (double l : lags) {
        if (!(l > 0.0)) throw validation_error("holder_time_exponent: lags must be > 0");
        lo = std::min(lo, l);
        hi = std::max(hi, l);
    }
    if (hi / lo < 10.0) throw validation_error("holder_time_exponent: lags must span a decade");
    if (paths < 1000) throw validation_error("holder_time_exponent: need >= 1000 paths");

    // increments from t = 0 (stationarity): B_l itself
    std::vector<double> t_grid(lags.begin(), lags.end());
    const std::vector<double> h_grid{H};
    const fbm::ExactFieldSampler sampler(model, t_grid, h_grid, 1);
    std::vector<double> sums(lags.size() * paths, 0.0);
    parallel_for(paths, threads, [&](std::size_t i) {
        const auto field = sampler.sample(rng::derive_seed(seed, i));
        for (std::size_t l = 0; l < lags.size(); ++l) {
            const double v = field.at(l, 0, 0);
            sums[l * paths + i] = v * v;
        }
    });
    std::vector<double> moments(lags.size());
    for (std::size_t l = 0; l < lags.size(); ++l)
        moments[l] =
            stats::mean(std::span<const double>(sums).subspan(l * paths, paths));
    return holder_regression(lags, moments);
}

// ---------------------------------------------------------------------------
// Hurst-direction variance bound (quadrature ratios).
// ---------------------------------------------------------------------------

inline BoundCheckReport hurst_direction_bound(const CovarianceModel& model,
                                              std::span<const double> t_grid,
                                              std::span<const std::pair<double, double>> h_pairs,
                                              Normalization mode = Normalization::unit_variance) {
    BoundCheckReport r;
    r.id = "hurst-direction";
    r.rule = "E(B_t^H - B_t^H')^2 / [(t^{2H} v t^{2H'})(log^2 t + 1)|H-H'|^2] bounded by "
             "10x its value at the reference point (t closest to 1)";
    for (double t : t_grid) {
        for (const auto& [H, Hp] : h_pairs) {
            RatioPoint p;
            p.coords = {{"t", t}, {"H", H}, {"H2", Hp}};
            p.statistic = (H == Hp) ? 0.0 : model.increment_second_moment(t, H, t, Hp, mode);
            const double dh = std::fabs(H - Hp);
            const double lt = (t > 0.0) ? std::log(t) : 0.0;
            p.bound = (t == 0.0 || dh == 0.0)
                          ? 0.0
                          : std::max(std::pow(t, 2.0 * H), std::pow(t, 2.0 * Hp)) *
                                (lt * lt + 1.0) * dh * dh;
            p.ratio = (p.bound > 0.0) ? p.statistic / p.bound : 0.0;
            r.points.push_back(std::move(p));
        }
    }
    detail::finalize(r, "t", 1.0);
    return r;
}

inline BoundCheckReport rectangular_bound(const CovarianceModel& model,
                                          std::span<const std::pair<double, double>> t_pairs,
                                          std::span<const std::pair<double, double>> h_pairs,
                                          Normalization mode = Normalization::unit_variance) {
    BoundCheckReport r;
    r.id = "rectangular";
    r.rule = "E(box increment)^2 / [(|dt|^{2H} v |dt|^{2H'})(log^2|dt| + 1)|H-H'|^2] bounded by "
             "10x its value at the reference point (|dt| closest to 1)";
    for (const auto& [t, tp] : t_pairs) {
        for (const auto& [H, Hp] : h_pairs) {
            RatioPoint p;
            const double dt = std::fabs(tp - t);
            p.coords = {{"t", t}, {"t2", tp}, {"H", H}, {"H2", Hp}, {"dt", dt}};
            p.statistic = model.rectangular_increment_second_moment(t, tp, H, Hp, mode);
            const double dh = std::fabs(H - Hp);
            const double ldt = (dt > 0.0) ? std::log(dt) : 0.0;
            p.bound = (dt == 0.0 || dh == 0.0)
                          ? 0.0
                          : std::max(std::pow(dt, 2.0 * H), std::pow(dt, 2.0 * Hp)) *
                                (ldt * ldt + 1.0) * dh * dh;
            p.ratio = (p.bound > 0.0) ? p.statistic / p.bound : 0.0;
            r.points.push_back(std::move(p));
        }
    }
    detail::finalize(r, "dt", 1.0);
    return r;
}

// ---------------------------------------------------------------------------
// Supremum over H of q-th moments across a |dt| sweep (Monte Carlo).
// ---------------------------------------------------------------------------

inline BoundCheckReport sup_h_moment(const CovarianceModel& model, double t_base,
                                     std::span<const double> dt_sweep, double q,
                                     std::span<const double> h_grid, std::size_t paths,
                                     std::uint64_t seed, int threads = 1) {
    if (h_grid.empty()) throw validation_error("sup_h_moment: empty Hurst grid");
    if (paths < 1000) throw validation_error("sup_h_moment: need >= 1000 paths");
    const double h_min = *std::min_element(h_grid.begin(), h_grid.end());
    const double h_max = *std::max_element(h_grid.begin(), h_grid.end());
    BoundCheckReport r;
    r.id = "sup-h";
    r.rule = "MC E sup_H |B_t^H - B_t'^H|^q / [(|dt|^{q hmin} v |dt|^{q hmax})(|log dt|^q + 1)] "
             "bounded by 10x its value at the reference point (|dt| closest to 1), 3 SE margin";
    for (double dt : dt_sweep) {
        if (!(dt > 0.0)) throw validation_error("sup_h_moment: dt values must be > 0");
        std::vector<double> t_grid{t_base, t_base + dt};
        if (t_base == 0.0) t_grid.erase(t_grid.begin());  // B_0 = 0 handled implicitly
        const fbm::ExactFieldSampler sampler(model, t_grid,
                                             std::vector<double>(h_grid.begin(), h_grid.end()), 1);
        std::vector<double> vals(paths, 0.0);
        parallel_for(paths, threads, [&](std::size_t i) {
            const auto field = sampler.sample(rng::derive_seed(seed, i));
            double m = 0.0;
            for (std::size_t ih = 0; ih < h_grid.size(); ++ih) {
                const double b1 = (t_base == 0.0) ? 0.0 : field.at(0, ih, 0);
                const double b2 = field.at(t_grid.size() - 1, ih, 0);
                m = std::max(m, std::fabs(b2 - b1));
            }
            vals[i] = std::pow(m, q);
        });
        RatioPoint p;
        p.coords = {{"dt", dt}, {"t", t_base}, {"q", q}};
        p.statistic = stats::mean(vals);
        const double ldt = std::fabs(std::log(dt));
        p.bound = std::max(std::pow(dt, q * h_min), std::pow(dt, q * h_max)) *
                  (std::pow(ldt, q) + 1.0);
        p.ratio = p.statistic / p.bound;
        p.se = detail::se_of_mean(vals) / p.bound;
        r.points.push_back(std::move(p));
    }
    detail::finalize(r, "dt", 1.0);
    return r;
}

// ---------------------------------------------------------------------------
// Pathwise Hoelder constants: per-seed grid maxima of normalized increments,
// with a quantile-stability verdict under horizon doubling.
// ---------------------------------------------------------------------------

enum class HolderMode { simple, rectangular };

namespace detail {

inline std::vector<double> pathwise_constants(const CovarianceModel& model, double eps,
                                              HolderMode mode, double horizon, std::size_t nt,
                                              std::span<const double> h_grid, std::size_t seeds,
                                              std::uint64_t seed0, int threads) {
    std::vector<double> t_grid(nt);
    for (std::size_t i = 0; i < nt; ++i)
        t_grid[i] = horizon * static_cast<double>(i + 1) / static_cast<double>(nt);
    const std::vector<double> hs(h_grid.begin(), h_grid.end());
    const double h_min = hs.front();
    const double h_max = hs.back();
    const fbm::ExactFieldSampler sampler(model, t_grid, hs, 1);
    const double time_exponent = 2.0 * eps * h_min + h_max;
    std::vector<double> out(seeds, 0.0);
    parallel_for(seeds, threads, [&](std::size_t s) {
        const auto field = sampler.sample(rng::derive_seed(seed0, s));
        double best = 0.0;
        for (std::size_t i = 0; i < nt; ++i) {
            for (std::size_t a = 0; a < hs.size(); ++a) {
                for (std::size_t j = i; j < nt; ++j) {
                    for (std::size_t b = 0; b < hs.size(); ++b) {
                        if (i == j && a == b) continue;
                        const double dt = t_grid[j] - t_grid[i];
                        const double dh = std::fabs(hs[b] - hs[a]);
                        const double tp = t_grid[j];
                        double stat, gauge;
                        if (mode == HolderMode::simple) {
                            stat = std::fabs(field.at(j, b, 0) - field.at(i, a, 0));
                            gauge = std::pow(std::min(1.0, std::pow(dt, h_min)) + dh, 1.0 - eps);
                        } else {
                            if (i == j || a == b) continue;
                            stat = std::fabs(field.at(j, b, 0) - field.at(i, b, 0) -
                                             field.at(j, a, 0) + field.at(i, a, 0));
                            gauge = std::pow(dh * std::min(1.0, std::pow(dt, h_min)), 1.0 - eps);
                        }
                        const double weight = std::pow(1.0 + tp, time_exponent);
                        best = std::max(best, stat / (weight * gauge));
                    }
                }
            }
        }
        out[s] = best;
    });
    return out;
}

}  // namespace detail

inline QuantileStabilityReport pathwise_holder_constant(const CovarianceModel& model, double eps,
                                                        HolderMode mode, double horizon,
                                                        std::size_t nt,
                                                        std::span<const double> h_grid,
                                                        std::size_t seeds, std::uint64_t seed0,
                                                        int threads = 1) {
    if (nt < 32) throw validation_error("pathwise_holder_constant: need >= 32 time points");
    if (h_grid.size() < 8) throw validation_error("pathwise_holder_constant: need >= 8 Hurst values");
    if (!(eps > 0.0 && eps < 1.0)) throw validation_error("pathwise_holder_constant: eps in (0,1)");
    QuantileStabilityReport r;
    r.id = (mode == HolderMode::simple) ? "pathwise-holder" : "pathwise-holder-rectangular";
    r.rule = "0.9-quantile of per-seed normalized grid maxima changes by < 25% when the horizon "
             "doubles (grid density per unit time kept fixed)";
    r.horizon1 = horizon;
    r.horizon2 = 2.0 * horizon;
    r.probs = {0.5, 0.75, 0.9};
    r.sample1 = detail::pathwise_constants(model, eps, mode, horizon, nt, h_grid, seeds, seed0,
                                           threads);
    r.sample2 = detail::pathwise_constants(model, eps, mode, 2.0 * horizon, 2 * nt, h_grid, seeds,
                                           rng::derive_seed(seed0, 0xd0b1e), threads);
    for (double p : r.probs) {
        r.quantiles1.push_back(stats::quantile(r.sample1, p));
        r.quantiles2.push_back(stats::quantile(r.sample2, p));
    }
    const double q1 = r.quantiles1.back();
    const double q2 = r.quantiles2.back();
    r.drift = std::fabs(q2 - q1) / std::max(q1, 1e-300);
    r.pass = r.drift < 0.25;
    return r;
}

// ---------------------------------------------------------------------------
// SDE Hurst-direction regularity (Monte Carlo over reference solutions).
// ---------------------------------------------------------------------------

struct SdeRegularityConfig {
    double eps = 0.1;
    double fine_dt = 0.0125;       // reference solver step
    double noise_l_factor = 40.0;  // noise lower bound = -(factor * horizon)
    double t_mix = 0.0;            // 0: use 2/kappa
};

inline BoundCheckReport sde_h_regularity(const CovarianceModel& model, const sde::DriftSpec& spec,
                                         double h_base, std::span<const double> deltas,
                                         std::span<const double> t_grid, std::size_t seeds,
                                         std::uint64_t seed0, SdeRegularityConfig cfg = {},
                                         int threads = 1) {
    if (deltas.empty()) throw validation_error("sde_h_regularity: no deltas");
    double prev = HUGE_VAL;
    for (double d : deltas) {
        if (!(d > 0.0 && d < prev))
            throw validation_error("sde_h_regularity: deltas must be positive and descending");
        prev = d;
    }
    const double horizon = *std::max_element(t_grid.begin(), t_grid.end());
    const double dt = cfg.fine_dt;
    const auto n_steps = static_cast<std::size_t>(std::llround(horizon / dt));
    if (std::fabs(static_cast<double>(n_steps) * dt - horizon) > 1e-9)
        throw validation_error("sde_h_regularity: fine_dt must divide the horizon");

    std::vector<double> h_grid{h_base};
    for (double d : deltas) h_grid.push_back(h_base + d);
    std::sort(h_grid.begin(), h_grid.end());
    std::vector<double> field_times(n_steps + 1);
    for (std::size_t i = 0; i <= n_steps; ++i) field_times[i] = static_cast<double>(i) * dt;

    const double lower = -dt * std::ceil(cfg.noise_l_factor * std::max(horizon, 1.0) / dt);
    fbm::MvnFieldSampler sampler(model);
    for (double h : h_grid) model.normalization(h);  // freeze caches before the parallel loop

    // second moments: [delta][t] across seeds
    std::vector<std::vector<std::vector<double>>> sq(
        deltas.size(),
        std::vector<std::vector<double>>(t_grid.size(), std::vector<double>(seeds, 0.0)));
    const std::vector<double> y0(1, 0.0);
    parallel_for(seeds, threads, [&](std::size_t s) {
        const fbm::WhiteNoiseGrid noise(dt, lower, horizon, 1, rng::derive_seed(seed0, s));
        const auto field = sampler.sample(noise, field_times, h_grid);
        const auto path = sde::solve_reference(field, spec, y0);
        for (std::size_t idd = 0; idd < deltas.size(); ++idd) {
            std::size_t ih_base = 0, ih_up = 0;
            for (std::size_t ih = 0; ih < path.h_grid.size(); ++ih) {
                if (path.h_grid[ih] == h_base) ih_base = ih;
                if (path.h_grid[ih] == h_base + deltas[idd]) ih_up = ih;
            }
            for (std::size_t it = 0; it < t_grid.size(); ++it) {
                const auto k = static_cast<std::size_t>(std::llround(t_grid[it] / dt));
                const double diff = path.at(k, ih_base, 0) - path.at(k, ih_up, 0);
                sq[idd][it][s] = diff * diff;
            }
        }
    });

    BoundCheckReport r;
    r.id = "sde-h";
    r.rule = "MC E|Y_t^H - Y_t^{H+d}|^2 / d^2: non-increasing in t beyond t_mix and within a "
             "factor 2 across consecutive deltas, 3 SE margins; c_hat anchored at the first "
             "(delta, t) point";
    r.factor = 1.0;  // the verdict below is structural; factor kept for report symmetry
    for (std::size_t idd = 0; idd < deltas.size(); ++idd) {
        for (std::size_t it = 0; it < t_grid.size(); ++it) {
            RatioPoint p;
            p.coords = {{"delta", deltas[idd]}, {"t", t_grid[it]}};
            p.statistic = stats::mean(sq[idd][it]);
            p.bound = deltas[idd] * deltas[idd];
            p.ratio = p.statistic / p.bound;
            p.se = detail::se_of_mean(sq[idd][it]) / p.bound;
            r.points.push_back(std::move(p));
        }
    }
    const double t_mix = cfg.t_mix > 0.0 ? cfg.t_mix : 2.0 / spec.kappa;
    bool ok = true;
    auto at = [&](std::size_t idd, std::size_t it) -> const RatioPoint& {
        return r.points[idd * t_grid.size() + it];
    };
    for (std::size_t idd = 0; idd < deltas.size(); ++idd) {
        for (std::size_t it = 0; it + 1 < t_grid.size(); ++it) {
            if (t_grid[it] < t_mix) continue;
            const auto& a = at(idd, it);
            const auto& b = at(idd, it + 1);
            if (b.ratio > a.ratio + 3.0 * (a.se + b.se)) ok = false;
        }
    }
    for (std::size_t idd = 0; idd + 1 < deltas.size(); ++idd) {
        for (std::size_t it = 0; it < t_grid.size(); ++it) {
            const auto& a = at(idd, it);
            const auto& b = at(idd + 1, it);  // smaller delta
            if (b.ratio > 2.0 * a.ratio + 3.0 * (b.se + 2.0 * a.se)) ok = false;
            if (b.ratio < 0.5 * a.ratio - 3.0 * (b.se + 0.5 * a.se)) ok = false;
        }
    }
    r.reference = 0;
    r.c_hat = r.points.empty() ? 0.0 : r.points[0].ratio;
    r.pass = ok;
    return r;
}

// ---------------------------------------------------------------------------
// Ergodic Hoelder-in-H ratio test (continuous and discrete modes).
// ---------------------------------------------------------------------------

struct ErgodicRegularityConfig {
    double gamma = 0.1;            // scheme step (discrete mode field step)
    double fine_dt = 0.025;        // reference solver step (continuous mode)
    double horizon = 40.0;         // continuous horizon T (window [0, T+1])
    std::size_t scheme_steps = 400;  // N for discrete mode
    double noise_l_factor = 40.0;
    double beta = 0.9;
    double safety = 2.0;
    double min_fraction = 0.9;
};

inline ErgodicRegularityReport ergodic_h_regularity(const CovarianceModel& model,
                                                    const sde::DriftSpec& spec, double h_base,
                                                    std::span<const double> deltas,
                                                    std::size_t seeds, std::uint64_t seed0,
                                                    sde::ErgodicMode mode,
                                                    ErgodicRegularityConfig cfg = {},
                                                    int threads = 1) {
    if (deltas.size() < 2) throw validation_error("ergodic_h_regularity: need >= 2 deltas");
    for (std::size_t i = 0; i + 1 < deltas.size(); ++i)
        if (std::fabs(deltas[i + 1] - 0.5 * deltas[i]) > 1e-9)
            throw validation_error("ergodic_h_regularity: deltas must halve");

    const bool discrete = (mode == sde::ErgodicMode::discrete);
    const double horizon = discrete ? cfg.gamma * static_cast<double>(cfg.scheme_steps)
                                    : cfg.horizon + 1.0;
    const double dt = discrete ? cfg.gamma : cfg.fine_dt;  // field step
    const auto n_steps = static_cast<std::size_t>(std::ceil(horizon / dt - 1e-9));
    std::vector<double> field_times(n_steps + 1);
    for (std::size_t i = 0; i <= n_steps; ++i) field_times[i] = static_cast<double>(i) * dt;

    std::vector<double> h_grid{h_base};
    for (double d : deltas) h_grid.push_back(h_base + d);
    std::sort(h_grid.begin(), h_grid.end());
    h_grid.erase(std::unique(h_grid.begin(), h_grid.end()), h_grid.end());

    const double lower = -dt * std::ceil(cfg.noise_l_factor * std::max(horizon, 1.0) / dt);
    fbm::MvnFieldSampler sampler(model);
    for (double h : h_grid) model.normalization(h);

    ErgodicRegularityReport r;
    r.id = discrete ? "ergodic-h-discrete" : "ergodic-h";
    r.beta = cfg.beta;
    r.safety = cfg.safety;
    r.min_fraction = cfg.min_fraction;
    r.deltas.assign(deltas.begin(), deltas.end());
    r.rule = "per-seed R(delta/2)/R(delta) <= 2^{-beta} * safety for >= 90% of seeds";
    r.r_values.assign(deltas.size(), std::vector<double>(seeds, 0.0));

    const std::vector<double> y0(1, 0.0);
    parallel_for(seeds, threads, [&](std::size_t s) {
        const fbm::WhiteNoiseGrid noise(dt, lower, field_times.back(), 1,
                                        rng::derive_seed(seed0, s));
        const auto field = sampler.sample(noise, field_times, h_grid);
        sde::PathSet path;
        if (discrete) {
            path = sde::euler_scheme(field, spec, y0, cfg.gamma, cfg.scheme_steps);
        } else {
            path = sde::solve_reference(field, spec, y0);
        }
        std::size_t ih_base = 0;
        for (std::size_t ih = 0; ih < path.h_grid.size(); ++ih)
            if (path.h_grid[ih] == h_base) ih_base = ih;
        const auto base_series = path.series(ih_base);
        for (std::size_t idd = 0; idd < deltas.size(); ++idd) {
            std::size_t ih_up = 0;
            for (std::size_t ih = 0; ih < path.h_grid.size(); ++ih)
                if (path.h_grid[ih] == h_base + deltas[idd]) ih_up = ih;
            const auto up_series = path.series(ih_up);
            const auto series =
                sde::ergodic_mean_sq_diff(path.t_grid, base_series, up_series, 1, mode);
            r.r_values[idd][s] = series.values.back();
        }
    });

    const double threshold = std::pow(2.0, -cfg.beta) * cfg.safety;
    for (std::size_t idd = 0; idd + 1 < deltas.size(); ++idd) {
        std::size_t passing = 0;
        for (std::size_t s = 0; s < seeds; ++s) {
            const double num = r.r_values[idd + 1][s];
            const double den = r.r_values[idd][s];
            if (den > 0.0 && num / den <= threshold) ++passing;
        }
        r.pass_fraction.push_back(static_cast<double>(passing) / static_cast<double>(seeds));
    }
    r.pass = std::all_of(r.pass_fraction.begin(), r.pass_fraction.end(),
                         [&](double f) { return f >= cfg.min_fraction; });
    return r;
}

// ---------------------------------------------------------------------------
// V-moment decay (Monte Carlo) and its pure regression core.
// ---------------------------------------------------------------------------

inline VDecayReport v_decay_regression(std::span<const double> times,
                                       std::span<const double> moments, int p, double h_max) {
    if (times.size() != moments.size() || times.size() < 4)
        throw validation_error("v_decay_regression: need >= 4 matched points");
    std::vector<double> shifted(times.size());
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (!(times[i] >= 0.0)) throw validation_error("v_decay_regression: times must be >= 0");
        shifted[i] = times[i] + 1.0;
    }
    VDecayReport r;
    r.id = "v-decay";
    r.regression = holder_regression(shifted, moments);
    r.threshold = -(2.0 * static_cast<double>(p) / 3.0) *
                      std::min(1.0, 4.0 - 4.0 * h_max) + 0.15;
    r.rule = "log-log slope of E|V_t|^{2p} against (t+1) must be <= -(2p/3)(1 ^ (4-4 h_max)) + 0.15";
    r.pass = r.regression.slope <= r.threshold;
    return r;
}

struct VDecayConfig {
    double dt = 0.05;
    double fou_tol = 1e-8;         // e^{-L} truncation budget for the stationary start
    double noise_l_factor = 40.0;
};

inline VDecayReport v_moment_decay(const CovarianceModel& model, const fou::FouCovariance& fcov,
                                   double H, double K, int p, std::span<const double> t_grid,
                                   std::size_t seeds, std::uint64_t seed0, VDecayConfig cfg = {},
                                   int threads = 1) {
    if (t_grid.size() < 4) throw validation_error("v_moment_decay: need >= 4 times");
    const double t_end = *std::max_element(t_grid.begin(), t_grid.end());
    if (t_end / *std::min_element(t_grid.begin(), t_grid.end()) < 10.0)
        throw validation_error("v_moment_decay: t grid must span a decade");
    if (H == K) throw validation_error("v_moment_decay: H = K makes V identically 0");

    const double dt = cfg.dt;
    const double fou_depth = fou::required_negative_extension(std::max(H, K), cfg.fou_tol);
    const double start = -dt * std::ceil(fou_depth / dt);
    const double stop = t_end + 1.0;
    const auto n_steps = static_cast<std::size_t>(std::ceil((stop - start) / dt - 1e-9));
    std::vector<double> field_times(n_steps + 1);
    for (std::size_t i = 0; i <= n_steps; ++i) field_times[i] = start + static_cast<double>(i) * dt;

    const double lower =
        -dt * std::ceil((cfg.noise_l_factor * std::max(stop, 1.0) - start) / dt);
    const std::vector<double> h_grid = (H < K) ? std::vector<double>{H, K}
                                               : std::vector<double>{K, H};
    fbm::MvnFieldSampler sampler(model);
    for (double h : h_grid) model.normalization(h);
    const double centering = fcov.mean_sq_diff0(H, K);

    std::vector<std::vector<double>> v_pow(t_grid.size(), std::vector<double>(seeds, 0.0));
    parallel_for(seeds, threads, [&](std::size_t s) {
        const fbm::WhiteNoiseGrid noise(dt, lower, field_times.back(), 1,
                                        rng::derive_seed(seed0, s));
        const auto field = sampler.sample(noise, field_times, h_grid);
        const auto path = fou::sample_fou(field, 0.0, cfg.fou_tol * 10.0);
        std::vector<double> a(path.t_grid.size()), b(path.t_grid.size());
        for (std::size_t it = 0; it < path.t_grid.size(); ++it) {
            a[it] = path.at(it, 0, 0);
            b[it] = path.at(it, 1, 0);
        }
        const auto series = sde::ergodic_mean_sq_diff(path.t_grid, a, b, 1,
                                                      sde::ErgodicMode::continuous, centering);
        for (std::size_t it = 0; it < t_grid.size(); ++it) {
            // snap to the nearest series time
            std::size_t best = 0;
            double best_d = HUGE_VAL;
            for (std::size_t k = 0; k < series.times.size(); ++k) {
                const double d = std::fabs(series.times[k] - t_grid[it]);
                if (d < best_d) {
                    best_d = d;
                    best = k;
                }
            }
            v_pow[it][s] = std::pow(series.values[best] * series.values[best],
                                    static_cast<double>(p));
        }
    });

    std::vector<double> moments(t_grid.size());
    for (std::size_t it = 0; it < t_grid.size(); ++it) moments[it] = stats::mean(v_pow[it]);
    auto report = v_decay_regression(t_grid, moments, p, std::max(H, K));
    report.id = "v-decay-mc";
    return report;
}

}  // namespace hurstlab::regcheck
