#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <vector>

#include "hurstlab/core/rng.hpp"
#include "hurstlab/fbm/covariance.hpp"

using namespace hurstlab;
using fbm::Normalization;

TEST_CASE("Brownian reduction: covariance is min(u,v)", "[covariance]") {
    fbm::CovarianceModel model;
    CHECK(model.cross(2.0, 0.5, 3.0, 0.5) == Catch::Approx(2.0).margin(1e-7));
    CHECK(model.cross(0.25, 0.5, 7.0, 0.5) == Catch::Approx(0.25).margin(1e-7));
    CHECK(model.normalization(0.5) == Catch::Approx(1.0).margin(1e-8));
}

TEST_CASE("zero time pins the covariance to zero", "[covariance]") {
    fbm::CovarianceModel model;
    CHECK(model.cross(0.0, 0.4, 5.0, 0.6) == 0.0);
    CHECK(model.cross(5.0, 0.4, 0.0, 0.6) == 0.0);
    CHECK(model.increment_second_moment(0.0, 0.3, 0.0, 0.9) == 0.0);
}

TEST_CASE("normalization constants match the independent oracle", "[covariance]") {
    fbm::CovarianceModel model;
    // frozen from high-precision arithmetic (see test_kernels for the
    // trapezoid oracle route)
    CHECK(model.normalization(0.3) == Catch::Approx(1.1761701925936892).epsilon(1e-7));
    CHECK(model.normalization(0.7) == Catch::Approx(0.9975410447214315).epsilon(1e-7));
}

TEST_CASE("cross-Hurst covariance at equal times", "[covariance]") {
    fbm::CovarianceModel model;
    // rho(0.3, 0.7) frozen from an independent high-resolution quadrature
    CHECK(model.rho(0.3, 0.7, Normalization::raw) ==
          Catch::Approx(0.8090169943749474).epsilon(1e-7));
    CHECK(model.rho(0.3, 0.7) == Catch::Approx(0.6895356129907763).epsilon(1e-7));
    // symmetry C(u,H,v,K) = C(v,K,u,H)
    CHECK(model.cross(1.0, 0.3, 2.0, 0.7) == Catch::Approx(model.cross(2.0, 0.7, 1.0, 0.3)));
    // frozen value of the asymmetric-time covariance
    CHECK(model.cross(1.0, 0.3, 2.0, 0.7) == Catch::Approx(0.9106023119005761).epsilon(1e-6));
}

TEST_CASE("unit-variance increments scale as |dt|^{2H}", "[covariance]") {
    fbm::CovarianceModel model;
    CHECK(model.increment_second_moment(1.0, 0.7, 0.5, 0.7) ==
          Catch::Approx(std::pow(0.5, 1.4)).margin(1e-6));
    for (double H : {0.3, 0.5, 0.8}) {
        for (auto [t, t2] : {std::pair{2.0, 0.4}, {0.2, 0.15}, {5.0, 1.0}}) {
            CHECK(model.increment_second_moment(t, H, t2, H) ==
                  Catch::Approx(std::pow(std::fabs(t - t2), 2.0 * H)).margin(2e-6));
        }
    }
}

TEST_CASE("symmetrized increment identity from the covariance scaling", "[covariance]") {
    fbm::CovarianceModel model;
    // E[(B_v^H - B_u^H)(B_v^K - B_u^K)] = (v-u)^{H+K} E B_1^H B_1^K (raw mode)
    const double H = 0.3, K = 0.7;
    const double rho = model.rho(H, K, Normalization::raw);
    for (auto [u, v] : {std::pair{1.0, 3.0}, {0.5, 1.0}, {2.0, 2.5}}) {
        const double lhs = model.cross(v, H, v, K, Normalization::raw) -
                           model.cross(v, H, u, K, Normalization::raw) -
                           model.cross(u, H, v, K, Normalization::raw) +
                           model.cross(u, H, u, K, Normalization::raw);
        CHECK(lhs == Catch::Approx(std::pow(v - u, H + K) * rho).margin(5e-7));
    }
}

TEST_CASE("law identity: shifted increments share the unshifted covariance", "[covariance]") {
    fbm::CovarianceModel model;
    for (auto [H, K] : {std::pair{0.3, 0.7}, {0.5, 0.5}}) {
        for (double s : {0.5, 2.0}) {
            for (auto [t, tp] : {std::pair{0.5, 1.5}, {1.0, 1.0}}) {
                const double shifted = model.shifted_increment_covariance(t, H, tp, K, s);
                const double plain = model.cross(t, H, tp, K);
                CHECK(shifted == Catch::Approx(plain).margin(2e-6));
            }
        }
    }
}

TEST_CASE("negative times are supported", "[covariance]") {
    fbm::CovarianceModel model;
    // variance at negative times matches |t|^{2H} in unit-variance mode
    CHECK(model.cross(-2.0, 0.3, -2.0, 0.3) == Catch::Approx(std::pow(2.0, 0.6)).margin(1e-6));
    // H = 1/2: disjoint sides of 0 are independent, overlap on the same side
    CHECK(model.cross(-1.0, 0.5, 2.0, 0.5) == Catch::Approx(0.0).margin(1e-7));
    CHECK(model.cross(-1.0, 0.5, -3.0, 0.5) == Catch::Approx(1.0).margin(1e-7));
    // increment stationarity across 0 (unit variance, mixed Hurst)
    const double a = model.shifted_increment_covariance(1.0, 0.35, 1.0, 0.65, -0.5);
    CHECK(a == Catch::Approx(model.cross(1.0, 0.35, 1.0, 0.65)).margin(2e-6));
}

TEST_CASE("assembled covariance matrices are PSD up to tolerance", "[covariance]") {
    fbm::CovarianceModel model;
    const std::vector<double> ts{0.5, 1.0, 2.0, 3.5};
    const std::vector<double> hs{0.35, 0.5, 0.65};
    const auto n = static_cast<Eigen::Index>(ts.size() * hs.size());
    Eigen::MatrixXd cov(n, n);
    for (Eigen::Index a = 0; a < n; ++a) {
        for (Eigen::Index b = 0; b < n; ++b) {
            const auto ia = static_cast<std::size_t>(a), ib = static_cast<std::size_t>(b);
            cov(a, b) = model.cross(ts[ia / hs.size()], hs[ia % hs.size()], ts[ib / hs.size()],
                                    hs[ib % hs.size()]);
        }
    }
    CHECK((cov - cov.transpose()).cwiseAbs().maxCoeff() < 1e-9);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
    CHECK(es.eigenvalues().minCoeff() > -1e-6);
}

TEST_CASE("covariance cache reuses rounded keys", "[covariance]") {
    fbm::CovarianceModel model;
    (void)model.cross(1.0, 0.4, 2.0, 0.6);
    const std::size_t before = model.cache_size();
    (void)model.cross(1.0 + 1e-14, 0.4, 2.0, 0.6);  // rounds onto the same key
    CHECK(model.cache_size() == before);
}
