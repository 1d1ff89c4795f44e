#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "hurstlab/core/parallel.hpp"
#include "hurstlab/core/stats.hpp"
#include "hurstlab/fbm/sampler.hpp"

using namespace hurstlab;
using fbm::Normalization;

TEST_CASE("exact sampler: zero times and unit variance", "[sampler]") {
    fbm::CovarianceModel model;
    // all-zero field when the only time is 0
    auto f0 = fbm::sample_field_exact(model, {0.0}, {0.3, 0.6}, 2, 11);
    for (double v : f0.values) CHECK(v == 0.0);

    // variance at t = 1 is 1 in unit-variance mode (MC over seeds)
    const std::size_t n = 20000;
    fbm::ExactFieldSampler sampler(model, {1.0}, {0.5}, 1);
    std::vector<double> xs(n);
    for (std::size_t i = 0; i < n; ++i) xs[i] = sampler.sample(rng::derive_seed(3, i)).at(0, 0, 0);
    const double v = stats::variance(xs);
    CHECK(std::fabs(v - 1.0) < 3.0 * std::sqrt(2.0 / static_cast<double>(n - 1)));
    CHECK(std::fabs(stats::mean(xs)) < 3.0 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("exact sampler: empirical covariance matches the model", "[sampler][mc]") {
    fbm::CovarianceModel model;
    const std::vector<double> ts{1.0, 2.0};
    const std::vector<double> hs{0.3, 0.7};
    fbm::ExactFieldSampler sampler(model, ts, hs, 1);
    const std::size_t n = 30000;
    std::vector<std::vector<double>> draws(4, std::vector<double>(n));
    parallel_for(n, default_threads(), [&](std::size_t i) {
        const auto f = sampler.sample(rng::derive_seed(17, i));
        draws[0][i] = f.at(0, 0, 0);
        draws[1][i] = f.at(0, 1, 0);
        draws[2][i] = f.at(1, 0, 0);
        draws[3][i] = f.at(1, 1, 0);
    });
    auto model_cov = [&](std::size_t a, std::size_t b) {
        return model.cross(ts[a / 2], hs[a % 2], ts[b / 2], hs[b % 2]);
    };
    for (std::size_t a = 0; a < 4; ++a) {
        for (std::size_t b = a; b < 4; ++b) {
            double acc = 0.0;
            for (std::size_t i = 0; i < n; ++i) acc += draws[a][i] * draws[b][i];
            const double emp = acc / static_cast<double>(n);
            const double expect = model_cov(a, b);
            const double se = std::sqrt(
                (model_cov(a, a) * model_cov(b, b) + expect * expect) / static_cast<double>(n));
            CHECK(std::fabs(emp - expect) < 3.5 * se);
        }
    }
}

TEST_CASE("exact sampler determinism", "[sampler]") {
    fbm::CovarianceModel model;
    const auto f1 = fbm::sample_field_exact(model, {0.5, 1.0}, {0.4, 0.6}, 2, 321);
    const auto f2 = fbm::sample_field_exact(model, {0.5, 1.0}, {0.4, 0.6}, 2, 321);
    REQUIRE(f1.values.size() == f2.values.size());
    for (std::size_t i = 0; i < f1.values.size(); ++i) CHECK(f1.values[i] == f2.values[i]);
}

TEST_CASE("projection sampler: t = 0 row is exactly zero", "[sampler]") {
    fbm::CovarianceModel model;
    fbm::WhiteNoiseGrid noise(0.125, -8.0, 2.0, 1, 5);
    const std::vector<double> ts{0.0, 0.5, 1.0};
    const std::vector<double> hs{0.3, 0.5, 0.8};
    const auto f = fbm::sample_field_mvn(model, noise, ts, hs);
    for (std::size_t ih = 0; ih < hs.size(); ++ih) CHECK(f.at(0, ih, 0) == 0.0);
}

TEST_CASE("projection sampler: Brownian case is exact in law", "[sampler][mc]") {
    fbm::CovarianceModel model;
    // H = 1/2 kernel weights are exactly the noise increments on [0, t]
    const std::size_t n = 5000;
    std::vector<double> xs(n);
    for (std::size_t i = 0; i < n; ++i) {
        fbm::WhiteNoiseGrid noise(0.25, -1.0, 1.0, 1, rng::derive_seed(9, i));
        const std::vector<double> ts{1.0};
        const std::vector<double> hs{0.5};
        xs[i] = fbm::sample_field_mvn(model, noise, ts, hs).at(0, 0, 0);
    }
    CHECK(std::fabs(stats::variance(xs) - 1.0) < 3.0 * std::sqrt(2.0 / static_cast<double>(n - 1)));
}

TEST_CASE("projection sampler: strong coupling across Hurst values", "[sampler][mc]") {
    fbm::CovarianceModel model;
    const std::vector<double> ts{1.0};
    const std::vector<double> hs{0.4, 0.6};
    fbm::MvnFieldSampler sampler(model);
    model.normalization(0.4);
    model.normalization(0.6);
    const std::size_t n = 4000;
    std::vector<double> a(n), b(n);
    const double lower = -64.0;
    parallel_for(n, default_threads(), [&](std::size_t i) {
        fbm::WhiteNoiseGrid noise(0.0625, lower, 1.0, 1, rng::derive_seed(23, i));
        const auto f = sampler.sample(noise, ts, hs);
        a[i] = f.at(0, 0, 0);
        b[i] = f.at(0, 1, 0);
    });
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sab += a[i] * b[i];
        saa += a[i] * a[i];
        sbb += b[i] * b[i];
    }
    const double corr = sab / std::sqrt(saa * sbb);
    CHECK(corr > 0.9);
    // the model correlation is rho(0.4, 0.6); MC value should sit within ~3 SE
    const double rho = model.rho(0.4, 0.6);
    CHECK(std::fabs(corr - rho) < 0.03);
}

TEST_CASE("projection sampler matches the exact sampler within bias bounds", "[sampler][mc]") {
    fbm::CovarianceModel model;
    const std::vector<double> ts{0.5, 1.0, 2.0};
    const std::vector<double> hs{0.35, 0.65};
    const double dt = 0.0625;
    const double tol = 1e-4;
    const double L = fbm::required_truncation(2.0, hs, tol);
    const double lower = -dt * std::ceil(L / dt);
    fbm::MvnFieldSampler sampler(model);
    for (double h : hs) model.normalization(h);

    const std::size_t n = 8000;
    const std::size_t npts = ts.size() * hs.size();
    std::vector<std::vector<double>> draws(npts, std::vector<double>(n));
    parallel_for(n, default_threads(), [&](std::size_t i) {
        fbm::WhiteNoiseGrid noise(dt, lower, 2.0, 1, rng::derive_seed(31, i));
        const auto f = sampler.sample(noise, ts, hs);
        for (std::size_t it = 0; it < ts.size(); ++it)
            for (std::size_t ih = 0; ih < hs.size(); ++ih)
                draws[it * hs.size() + ih][i] = f.at(it, ih, 0);
    });
    fbm::WhiteNoiseGrid noise(dt, lower, 2.0, 1, 0);
    for (std::size_t p = 0; p < npts; ++p) {
        for (std::size_t q = p; q < npts; ++q) {
            const double tu = ts[p / hs.size()], hu = hs[p % hs.size()];
            const double tv = ts[q / hs.size()], hv = hs[q % hs.size()];
            double acc = 0.0;
            for (std::size_t i = 0; i < n; ++i) acc += draws[p][i] * draws[q][i];
            const double emp = acc / static_cast<double>(n);
            const double expect = model.cross(tu, hu, tv, hv);
            const double se =
                std::sqrt((model.cross(tu, hu, tu, hu) * model.cross(tv, hv, tv, hv) +
                           expect * expect) / static_cast<double>(n));
            const double bias = sampler.covariance_bias_bound(noise, tu, hu, tv, hv);
            CHECK(std::fabs(emp - expect) < 3.5 * se + bias);
        }
    }
}

TEST_CASE("projection sampler rejects misaligned grids", "[sampler]") {
    fbm::CovarianceModel model;
    fbm::WhiteNoiseGrid noise(0.25, -1.0, 1.0, 1, 5);
    const std::vector<double> hs{0.5};
    const std::vector<double> bad{0.3};
    CHECK_THROWS_AS(fbm::sample_field_mvn(model, noise, bad, hs), validation_error);
    const std::vector<double> outside{4.0};
    CHECK_THROWS_AS(fbm::sample_field_mvn(model, noise, outside, hs), validation_error);
}

TEST_CASE("projection sampler determinism", "[sampler]") {
    fbm::CovarianceModel model;
    fbm::WhiteNoiseGrid noise(0.125, -4.0, 2.0, 2, 77);
    const std::vector<double> ts{0.5, 1.0, 2.0};
    const std::vector<double> hs{0.4, 0.7};
    const auto f1 = fbm::sample_field_mvn(model, noise, ts, hs);
    const auto f2 = fbm::sample_field_mvn(model, noise, ts, hs);
    REQUIRE(f1.values.size() == f2.values.size());
    for (std::size_t i = 0; i < f1.values.size(); ++i) CHECK(f1.values[i] == f2.values[i]);
}
