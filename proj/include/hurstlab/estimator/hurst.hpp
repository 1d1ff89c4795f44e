#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "hurstlab/core/errors.hpp"
#include "hurstlab/core/rng.hpp"
#include "hurstlab/estimator/wasserstein.hpp"
#include "hurstlab/fbm/sampler.hpp"
#include "hurstlab/fbm/white_noise.hpp"
#include "hurstlab/sde/sde.hpp"

namespace hurstlab::est {

struct EstimatorConfig {
    std::vector<double> k_grid;   // ascending candidates in (0,1)
    int p = 2;                    // Wasserstein order
    std::size_t scheme_steps = 0; // N
    double gamma = 0.0;           // scheme step, must satisfy gamma < gamma_0
    double h = 0.0;               // observation step of the data (recorded)
    bool crn = true;              // common random numbers across candidates
    long burn_in = -1;            // scheme steps dropped; -1 = ceil(1/(kappa*gamma))
    double noise_l_factor = 16.0; // noise lower bound = -(factor * horizon)

    void validate() const {
        if (k_grid.empty()) throw validation_error("estimator: empty candidate grid");
        double prev = 0.0;
        for (double k : k_grid) {
            if (!(k > 0.0 && k < 1.0 && k > prev))
                throw validation_error("estimator: candidate grid must be ascending inside (0,1)");
            prev = k;
        }
        if (p != 1 && p != 2) throw validation_error("estimator: p must be 1 or 2");
        if (scheme_steps < 2) throw validation_error("estimator: N must be >= 2");
        if (!(gamma > 0.0)) throw validation_error("estimator: gamma must be > 0");
        if (!(noise_l_factor >= 1.0)) throw validation_error("estimator: L factor must be >= 1");
    }
};

struct ProfilePoint {
    double k = 0.0;
    double distance = 0.0;
};

struct HurstEstimate {
    double h_hat = 0.0;
    std::vector<ProfilePoint> profile;
    // (1/(N-burn)) sum |M^{K_i} - M^{K_{i+1}}|^2 over the retained steps, for
    // adjacent candidates; empty unless common random numbers were used.
    std::vector<double> adjacent_mean_sq_diff;
    long burn_in = 0;
    double noise_lower = 0.0;
};

inline std::size_t argmin_profile(const std::vector<ProfilePoint>& profile) {
    if (profile.empty()) throw validation_error("argmin_profile: empty profile");
    std::size_t best = 0;
    for (std::size_t i = 1; i < profile.size(); ++i)
        if (profile[i].distance < profile[best].distance) best = i;  // ties keep the smaller K
    return best;
}

// Grid-argmin Hurst estimator: builds the observed empirical measure, runs the
// Euler scheme for every candidate K on one shared field (CRN) or independent
// fields, and minimizes the Wasserstein distance between empirical measures.
// `observed` holds one vector of samples per component.
inline HurstEstimate estimate_hurst(const fbm::CovarianceModel& model,
                                    const std::vector<std::vector<double>>& observed,
                                    const sde::DriftSpec& spec, const EstimatorConfig& cfg,
                                    std::uint64_t seed) {
    cfg.validate();
    if (observed.empty()) throw validation_error("estimate_hurst: no observed components");
    const int dim = static_cast<int>(observed.size());
    for (const auto& comp : observed)
        if (comp.size() < 2)
            throw validation_error("estimate_hurst: need >= 2 observed samples per component");

    const double g0 = sde::gamma0(spec);
    if (!(cfg.gamma < g0))
        throw validation_error("estimate_hurst: gamma violates gamma_0 = " + std::to_string(g0));
    const long burn = cfg.burn_in >= 0
                          ? cfg.burn_in
                          : static_cast<long>(std::ceil(1.0 / (spec.kappa * cfg.gamma)));
    if (burn + 2 > static_cast<long>(cfg.scheme_steps))
        throw validation_error("estimate_hurst: burn-in leaves fewer than 2 scheme samples");

    std::vector<EmpiricalMeasure> observed_measures;
    observed_measures.reserve(observed.size());
    for (const auto& comp : observed) observed_measures.emplace_back(comp);

    const double horizon = cfg.gamma * static_cast<double>(cfg.scheme_steps);
    const double lower =
        -cfg.gamma * std::ceil(cfg.noise_l_factor * horizon / cfg.gamma);
    std::vector<double> t_grid(cfg.scheme_steps + 1);
    for (std::size_t k = 0; k <= cfg.scheme_steps; ++k)
        t_grid[k] = static_cast<double>(k) * cfg.gamma;
    const std::vector<double> m0(static_cast<std::size_t>(dim), 0.0);

    HurstEstimate result;
    result.burn_in = burn;
    result.noise_lower = lower;

    fbm::MvnFieldSampler sampler(model);
    auto scheme_for = [&](const fbm::FbmField& field) {
        return sde::euler_scheme(field, spec, m0, cfg.gamma, cfg.scheme_steps);
    };
    auto distance_to_observed = [&](const sde::PathSet& path, std::size_t ih) {
        double dist = 0.0;
        for (int c = 0; c < dim; ++c) {
            std::vector<double> atoms;
            atoms.reserve(cfg.scheme_steps - static_cast<std::size_t>(burn));
            for (std::size_t k = static_cast<std::size_t>(burn) + 1; k <= cfg.scheme_steps; ++k)
                atoms.push_back(path.at(k, ih, c));
            const double w =
                wasserstein_1d(observed_measures[static_cast<std::size_t>(c)],
                               EmpiricalMeasure(std::move(atoms)), cfg.p);
            dist = std::max(dist, w);  // componentwise max, bounded by W_p
        }
        return dist;
    };

    if (cfg.crn) {
        const fbm::WhiteNoiseGrid noise(cfg.gamma, lower, horizon, dim,
                                        rng::derive_seed(seed, 0));
        const fbm::FbmField field = sampler.sample(noise, t_grid, cfg.k_grid);
        const sde::PathSet paths = scheme_for(field);
        for (std::size_t ih = 0; ih < cfg.k_grid.size(); ++ih)
            result.profile.push_back({cfg.k_grid[ih], distance_to_observed(paths, ih)});
        for (std::size_t ih = 0; ih + 1 < cfg.k_grid.size(); ++ih) {
            double acc = 0.0;
            for (std::size_t k = static_cast<std::size_t>(burn) + 1; k <= cfg.scheme_steps; ++k)
                for (int c = 0; c < dim; ++c) {
                    const double diff = paths.at(k, ih, c) - paths.at(k, ih + 1, c);
                    acc += diff * diff;
                }
            result.adjacent_mean_sq_diff.push_back(
                acc / static_cast<double>(cfg.scheme_steps - static_cast<std::size_t>(burn)));
        }
    } else {
        for (std::size_t ih = 0; ih < cfg.k_grid.size(); ++ih) {
            const fbm::WhiteNoiseGrid noise(cfg.gamma, lower, horizon, dim,
                                            rng::derive_seed(seed, ih + 1));
            const std::vector<double> single{cfg.k_grid[ih]};
            const fbm::FbmField field = sampler.sample(noise, t_grid, single);
            const sde::PathSet paths = scheme_for(field);
            result.profile.push_back({cfg.k_grid[ih], distance_to_observed(paths, 0)});
        }
    }
    result.h_hat = result.profile[argmin_profile(result.profile)].k;
    return result;
}

}  // namespace hurstlab::est
