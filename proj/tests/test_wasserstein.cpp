#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "hurstlab/core/rng.hpp"
#include "hurstlab/estimator/wasserstein.hpp"

using namespace hurstlab;
using est::EmpiricalMeasure;

TEST_CASE("wasserstein basic values", "[wasserstein]") {
    EmpiricalMeasure a({0.0});
    EmpiricalMeasure b({1.0});
    CHECK(est::wasserstein_1d(a, a, 2) == 0.0);
    CHECK(est::wasserstein_1d(a, b, 2) == Catch::Approx(1.0));
    CHECK(est::wasserstein_1d(a, b, 1) == Catch::Approx(1.0));

    // quantile matching forces W2^2 = (1^2 + 1^2)/2 = 1
    EmpiricalMeasure c({0.0, 2.0});
    EmpiricalMeasure d({1.0, 1.0});
    CHECK(est::wasserstein_1d(c, d, 2) == Catch::Approx(1.0));
    CHECK(est::wasserstein_1d(c, d, 1) == Catch::Approx(1.0));
}

TEST_CASE("wasserstein with unequal atom counts is exact", "[wasserstein]") {
    // quantile functions: a = 0 on (0,1/2), 1 on (1/2,1); b = 0 on (0,1/3),
    // 1 on (1/3,2/3), 2 on (2/3,1). W1 = 1/3 + ... integrate |Fa^-1 - Fb^-1|:
    // on (1/3,1/2): |0-1| = 1; on (2/3,1): |1-2| = 1 -> total 1/6 + 1/3 = 1/2
    EmpiricalMeasure a({0.0, 1.0});
    EmpiricalMeasure b({0.0, 1.0, 2.0});
    CHECK(est::wasserstein_1d(a, b, 1) == Catch::Approx(0.5));
    CHECK(est::wasserstein_1d(a, b, 2) == Catch::Approx(std::sqrt(0.5)));
}

TEST_CASE("wasserstein validates input", "[wasserstein]") {
    CHECK_THROWS_AS(EmpiricalMeasure({}), validation_error);
    EmpiricalMeasure a({0.0});
    CHECK_THROWS_AS(est::wasserstein_1d(a, a, 3), validation_error);
}

namespace {

EmpiricalMeasure random_measure(std::uint64_t seed, std::size_t n, double shift = 0.0) {
    rng::CounterRng gen(seed, 0);
    std::vector<double> atoms(n);
    for (std::size_t i = 0; i < n; ++i) atoms[i] = 2.0 * gen.gaussian(i) + shift;
    return EmpiricalMeasure(std::move(atoms));
}

}  // namespace

TEST_CASE("metric axioms on random triples", "[wasserstein][property]") {
    for (std::uint64_t rep = 0; rep < 40; ++rep) {
        const auto a = random_measure(3 * rep + 1, 7 + rep % 5);
        const auto b = random_measure(3 * rep + 2, 9 + rep % 4);
        const auto c = random_measure(3 * rep + 3, 5 + rep % 7);
        for (int p : {1, 2}) {
            const double dab = est::wasserstein_1d(a, b, p);
            const double dba = est::wasserstein_1d(b, a, p);
            const double dac = est::wasserstein_1d(a, c, p);
            const double dcb = est::wasserstein_1d(c, b, p);
            CHECK(dab == Catch::Approx(dba).margin(1e-14));
            CHECK(dab >= 0.0);
            CHECK(dab <= dac + dcb + 1e-12);
            CHECK(est::wasserstein_1d(a, a, p) == 0.0);
        }
    }
}

TEST_CASE("translation invariance is exact", "[wasserstein][property]") {
    for (std::uint64_t rep = 0; rep < 20; ++rep) {
        const auto a = random_measure(100 + rep, 11);
        const auto b = random_measure(200 + rep, 6);
        const double shift = static_cast<double>(rep) * 0.37 - 2.0;
        std::vector<double> sa = a.atoms(), sb = b.atoms();
        for (double& v : sa) v += shift;
        for (double& v : sb) v += shift;
        const EmpiricalMeasure a2(std::move(sa)), b2(std::move(sb));
        for (int p : {1, 2}) {
            CHECK(est::wasserstein_1d(a2, b2, p) ==
                  Catch::Approx(est::wasserstein_1d(a, b, p)).margin(1e-12));
        }
    }
}
