#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "hurstlab/core/interp.hpp"
#include "hurstlab/core/quadrature.hpp"

using namespace hurstlab;

TEST_CASE("adaptive quadrature on smooth integrands", "[quad]") {
    auto r = quad::integrate([](double x) { return std::sin(x); }, 0.0, 3.141592653589793, 1e-12);
    REQUIRE(r.converged);
    CHECK(r.value == Catch::Approx(2.0).epsilon(1e-12));

    r = quad::integrate([](double x) { return std::exp(-x * x); }, -8.0, 8.0, 1e-12);
    REQUIRE(r.converged);
    CHECK(r.value == Catch::Approx(std::sqrt(3.141592653589793)).epsilon(1e-12));
}

TEST_CASE("endpoint power substitution resolves integrable singularities", "[quad]") {
    // int_0^1 x^{-1/2} dx = 2
    auto r = quad::integrate_endpoint_power([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0,
                                            -0.5, 0.0, 1e-10);
    REQUIRE(r.converged);
    CHECK(r.value == Catch::Approx(2.0).epsilon(1e-9));

    // int_0^1 x^{-0.9} dx = 10; the singular endpoint sits at the variable
    // origin so the distance is available without cancellation
    r = quad::integrate_endpoint_power([](double x) { return std::pow(x, -0.9); }, 0.0, 1.0, -0.9,
                                       0.0, 1e-9);
    REQUIRE(r.converged);
    CHECK(r.value == Catch::Approx(10.0).epsilon(1e-7));

    // both endpoints: int_0^1 x^{-0.3} (1-x)^{-0.4} dx = B(0.7, 0.6)
    r = quad::integrate_endpoint_power(
        [](double x) { return std::pow(x, -0.3) * std::pow(1.0 - x, -0.4); }, 0.0, 1.0, -0.3,
        -0.4, 1e-10);
    REQUIRE(r.converged);
    const double beta = std::tgamma(0.7) * std::tgamma(0.6) / std::tgamma(1.3);
    CHECK(r.value == Catch::Approx(beta).epsilon(1e-8));
}

TEST_CASE("power tail integration", "[quad]") {
    // int_2^inf x^{-2.2} dx = 2^{-1.2} / 1.2
    auto r = quad::integrate_power_tail([](double x) { return std::pow(x, -2.2); }, 2.0, 2.2,
                                        1e-11);
    REQUIRE(r.converged);
    CHECK(r.value == Catch::Approx(std::pow(2.0, -1.2) / 1.2).epsilon(1e-9));

    // slowly decaying: int_1^inf x^{-1.1} dx = 10
    r = quad::integrate_power_tail([](double x) { return std::pow(x, -1.1); }, 1.0, 1.1, 1e-9);
    REQUIRE(r.converged);
    CHECK(r.value == Catch::Approx(10.0).epsilon(1e-7));
}

TEST_CASE("non-convergence is reported honestly", "[quad]") {
    // genuinely divergent integrand cannot reach the tolerance
    auto r = quad::integrate([](double x) { return 1.0 / x; }, 0.0, 1.0, 1e-10, 64);
    CHECK_FALSE(r.converged);
    CHECK_THROWS_AS(quad::require(r, "divergent"), numerical_error);
}

TEST_CASE("pchip interpolation is exact on its nodes and monotone", "[interp]") {
    std::vector<double> x{0.0, 0.5, 1.0, 2.0, 4.0};
    std::vector<double> y{0.0, 0.3, 0.4, 0.9, 1.0};
    interp::Pchip f(x, y);
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(f(x[i]) == Catch::Approx(y[i]).margin(1e-14));
    double prev = f(0.0);
    for (double t = 0.01; t <= 4.0; t += 0.01) {
        const double v = f(t);
        CHECK(v >= prev - 1e-12);
        prev = v;
    }
    CHECK_THROWS_AS(interp::Pchip({1.0, 1.0}, {0.0, 0.0}), validation_error);
}
