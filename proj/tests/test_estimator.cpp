#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "hurstlab/estimator/hurst.hpp"

using namespace hurstlab;

TEST_CASE("profile argmin with tie-break to the smallest K", "[estimator]") {
    std::vector<est::ProfilePoint> profile{{0.3, 0.5}, {0.5, 0.2}, {0.7, 0.4}};
    CHECK(est::argmin_profile(profile) == 1);
    std::vector<est::ProfilePoint> tie{{0.3, 0.2}, {0.5, 0.5}, {0.7, 0.2}};
    CHECK(est::argmin_profile(tie) == 0);
    CHECK_THROWS_AS(est::argmin_profile({}), validation_error);
}

TEST_CASE("estimator config validation", "[estimator]") {
    est::EstimatorConfig cfg;
    cfg.k_grid = {0.4, 0.3};
    cfg.scheme_steps = 100;
    cfg.gamma = 0.05;
    CHECK_THROWS_AS(cfg.validate(), validation_error);
    cfg.k_grid = {0.3, 0.4};
    cfg.p = 3;
    CHECK_THROWS_AS(cfg.validate(), validation_error);
    cfg.p = 2;
    CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("estimator recovers the Hurst exponent on a short run", "[estimator][mc]") {
    fbm::CovarianceModel model;
    const auto spec = sde::linear_drift(1.0);
    const double gamma = 0.1;
    const std::size_t steps = 3000;

    est::EstimatorConfig cfg;
    cfg.k_grid = {0.35, 0.5, 0.65, 0.8};
    cfg.p = 2;
    cfg.gamma = gamma;
    cfg.h = gamma;
    cfg.scheme_steps = steps;
    cfg.noise_l_factor = 8.0;
    cfg.crn = true;

    // observed path: the same scheme at the true H with an independent seed
    const double true_h = 0.65;
    const double horizon = gamma * static_cast<double>(steps);
    const double lower = -gamma * std::ceil(8.0 * horizon / gamma);
    fbm::WhiteNoiseGrid noise(gamma, lower, horizon, 1, rng::derive_seed(909, 12345));
    std::vector<double> ts(steps + 1);
    for (std::size_t k = 0; k <= steps; ++k) ts[k] = static_cast<double>(k) * gamma;
    const std::vector<double> hs{true_h};
    const auto field = fbm::sample_field_mvn(model, noise, ts, hs);
    const std::vector<double> m0{0.0};
    const auto observed_path = sde::euler_scheme(field, spec, m0, gamma, steps);
    std::vector<double> obs;
    for (std::size_t k = 10; k <= steps; ++k) obs.push_back(observed_path.at(k, 0, 0));

    const auto result = est::estimate_hurst(model, {obs}, spec, cfg, 2222);
    REQUIRE(result.profile.size() == cfg.k_grid.size());
    CHECK(std::fabs(result.h_hat - true_h) <= 0.15001);

    // profile regularity: |f(K) - f(K')|^2 <= mean square scheme difference
    for (std::size_t i = 0; i + 1 < result.profile.size(); ++i) {
        const double df = result.profile[i].distance - result.profile[i + 1].distance;
        CHECK(df * df <= result.adjacent_mean_sq_diff[i] * (1.0 + 1e-9) + 1e-12);
    }
}

TEST_CASE("estimator determinism", "[estimator]") {
    fbm::CovarianceModel model;
    const auto spec = sde::linear_drift(1.0);
    est::EstimatorConfig cfg;
    cfg.k_grid = {0.4, 0.6};
    cfg.gamma = 0.1;
    cfg.h = 0.1;
    cfg.scheme_steps = 300;
    cfg.noise_l_factor = 4.0;
    std::vector<double> obs;
    for (int i = 0; i < 50; ++i) obs.push_back(std::sin(0.37 * i));
    const auto r1 = est::estimate_hurst(model, {obs}, spec, cfg, 5);
    const auto r2 = est::estimate_hurst(model, {obs}, spec, cfg, 5);
    CHECK(r1.h_hat == r2.h_hat);
    REQUIRE(r1.profile.size() == r2.profile.size());
    for (std::size_t i = 0; i < r1.profile.size(); ++i)
        CHECK(r1.profile[i].distance == r2.profile[i].distance);
    // independent-noise mode changes the profile but stays deterministic
    cfg.crn = false;
    const auto r3 = est::estimate_hurst(model, {obs}, spec, cfg, 5);
    const auto r4 = est::estimate_hurst(model, {obs}, spec, cfg, 5);
    for (std::size_t i = 0; i < r3.profile.size(); ++i)
        CHECK(r3.profile[i].distance == r4.profile[i].distance);
}
