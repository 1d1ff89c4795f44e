#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>

#include "hurstlab/core/rng.hpp"
#include "hurstlab/core/stats.hpp"
#include "hurstlab/fbm/white_noise.hpp"

using namespace hurstlab;

TEST_CASE("philox4x32-10 matches the published test vectors", "[rng]") {
    // Known-answer tests from the reference implementation of the generator.
    auto out = rng::Philox4x32::block({0, 0, 0, 0}, {0, 0});
    CHECK(out[0] == 0x6627e8d5u);
    CHECK(out[1] == 0xe169c58du);
    CHECK(out[2] == 0xbc57ac4cu);
    CHECK(out[3] == 0x9b00dbd8u);

    out = rng::Philox4x32::block({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                                 {0xffffffffu, 0xffffffffu});
    CHECK(out[0] == 0x408f276du);
    CHECK(out[1] == 0x41c83b0eu);
    CHECK(out[2] == 0xa20bc7c6u);
    CHECK(out[3] == 0x6d5451fdu);

    out = rng::Philox4x32::block({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                                 {0xa4093822u, 0x299f31d0u});
    CHECK(out[0] == 0xd16cfe09u);
    CHECK(out[1] == 0x94fdccebu);
    CHECK(out[2] == 0x5001e420u);
    CHECK(out[3] == 0x24126ea1u);
}

TEST_CASE("normal quantile matches reference values", "[rng]") {
    CHECK(rng::normal_quantile(0.5) == Catch::Approx(0.0).margin(1e-15));
    CHECK(rng::normal_quantile(0.75) == Catch::Approx(0.6744897501960817).epsilon(1e-13));
    CHECK(rng::normal_quantile(0.975) == Catch::Approx(1.959963984540054).epsilon(1e-13));
    CHECK(rng::normal_quantile(0.999) == Catch::Approx(3.090232306167813).epsilon(1e-13));
    CHECK(rng::normal_quantile(0.3) == Catch::Approx(-0.5244005127080409).epsilon(1e-13));
    CHECK(rng::normal_quantile(1e-10) == Catch::Approx(-6.361340902404056).epsilon(1e-12));
    CHECK_THROWS_AS(rng::normal_quantile(0.0), validation_error);
    CHECK_THROWS_AS(rng::normal_quantile(1.0), validation_error);
}

TEST_CASE("counter rng is reproducible and stream-separated", "[rng]") {
    rng::CounterRng a(42, 0), a2(42, 0), b(42, 1), c(43, 0);
    for (std::uint64_t i = 0; i < 64; ++i) {
        CHECK(a.bits(i) == a2.bits(i));
        CHECK(a.bits(i) != b.bits(i));
        CHECK(a.bits(i) != c.bits(i));
        const double u = a.uniform(i);
        CHECK(u > 0.0);
        CHECK(u < 1.0);
    }
}

TEST_CASE("derived seeds are distinct across tasks", "[rng]") {
    std::set<std::uint64_t> seen;
    for (std::uint64_t task = 0; task < 4096; ++task)
        seen.insert(rng::derive_seed(0xabcdef, task));
    CHECK(seen.size() == 4096);
}

TEST_CASE("white noise increments have mean 0 and variance dt", "[rng][mc]") {
    const double dt = 0.25;
    fbm::WhiteNoiseGrid grid(dt, -2.0, 3.0, 2, 7);
    CHECK(grid.cells() == 20);
    CHECK(grid.negative_cells() == 8);

    const std::size_t n_seeds = 4000;
    std::vector<double> draws;
    draws.reserve(n_seeds);
    for (std::size_t s = 0; s < n_seeds; ++s) {
        fbm::WhiteNoiseGrid g(dt, -2.0, 3.0, 2, s);
        draws.push_back(g.increment(5, 1));
    }
    const double m = stats::mean(draws);
    const double v = stats::variance(draws);
    const double se_mean = std::sqrt(dt / static_cast<double>(n_seeds));
    CHECK(std::fabs(m) < 3.0 * se_mean);
    // SE of the sample variance of a Gaussian is var * sqrt(2/(n-1))
    CHECK(std::fabs(v - dt) < 3.0 * dt * std::sqrt(2.0 / static_cast<double>(n_seeds - 1)));

    // identical seed => bit-identical increments
    fbm::WhiteNoiseGrid g1(dt, -2.0, 3.0, 2, 99), g2(dt, -2.0, 3.0, 2, 99);
    for (std::size_t j = 0; j < g1.cells(); ++j) {
        CHECK(g1.increment(j, 0) == g2.increment(j, 0));
        CHECK(g1.increment(j, 1) == g2.increment(j, 1));
    }
}

TEST_CASE("white noise grid validates its configuration", "[rng]") {
    CHECK_THROWS_AS(fbm::WhiteNoiseGrid(0.0, -1.0, 1.0, 1, 0), validation_error);
    CHECK_THROWS_AS(fbm::WhiteNoiseGrid(0.1, 0.5, 1.0, 1, 0), validation_error);
    CHECK_THROWS_AS(fbm::WhiteNoiseGrid(0.3, -1.0, 1.0, 1, 0), validation_error);  // misaligned
    CHECK_THROWS_AS(fbm::WhiteNoiseGrid(0.1, -1.0, 1.0, 0, 0), validation_error);
}
