#include "doctest.h"
#include "pmbm/mathkit.hpp"
#include "test_util.hpp"

#include <cmath>
#include <random>

using namespace pmbm;
using namespace pmbm::math;

TEST_CASE("chol_psd identity and scalar matrices") {
    Eigen::Matrix2d id = Eigen::Matrix2d::Identity();
    CHECK((chol_psd(id) - id).norm() <= 1e-10);
    CHECK((chol_psd(4.0 * id) - 2.0 * id).norm() <= 1e-10);
}

TEST_CASE("chol_psd reconstructs random SPD matrices") {
    std::mt19937_64 rng(1);
    for (int trial = 0; trial < 1000; ++trial) {
        const int n = (trial % 2 == 0) ? 2 : 4;
        const Eigen::MatrixXd a = testutil::random_spd(rng, n);
        const Eigen::MatrixXd l = chol_psd(a);
        CHECK((l * l.transpose() - a).norm() <= 1e-10 * a.norm());
    }
}

TEST_CASE("chol_psd rejects indefinite input") {
    Eigen::Matrix2d m;
    m << 1.0, 0.0, 0.0, -1.0;
    CHECK_THROWS_AS(chol_psd(m), NotPositiveDefinite);
}

TEST_CASE("sqrtm_psd identity and scalar matrices") {
    Eigen::Matrix2d id = Eigen::Matrix2d::Identity();
    CHECK((sqrtm_psd(id) - id).norm() == doctest::Approx(0.0).epsilon(1e-12));
    CHECK((sqrtm_psd(9.0 * id) - 3.0 * id).norm() == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("sqrtm_psd squares back and stays symmetric PSD") {
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 500; ++trial) {
        const Eigen::MatrixXd a = testutil::random_spd(rng, 2);
        const Eigen::MatrixXd s = sqrtm_psd(a);
        CHECK((s - s.transpose()).norm() <= 1e-12 * s.norm());
        CHECK((s * s - a).norm() <= 1e-9 * a.norm());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s);
        CHECK(es.eigenvalues().minCoeff() >= -1e-10 * s.trace());
    }
}

TEST_CASE("sqrtm_psd rejects negative eigenvalues") {
    Eigen::Matrix2d m;
    m << 1.0, 0.0, 0.0, -1.0;
    CHECK_THROWS_AS(sqrtm_psd(m), NotPositiveSemiDefinite);
}

TEST_CASE("ln_multigamma known values") {
    CHECK(ln_multigamma(1, 2.0) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(ln_multigamma(2, 2.0) == doctest::Approx(std::log(M_PI / 2.0)).epsilon(1e-12));
    // product identity at d=2, x=10
    const double direct = 0.5 * std::log(M_PI) + std::lgamma(10.0) + std::lgamma(9.5);
    CHECK(ln_multigamma(2, 10.0) == doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("ln_multigamma matches scalar log-gamma at d=1") {
    for (double x = 0.5; x <= 50.0; x += 0.5) {
        CHECK(ln_multigamma(1, x) == doctest::Approx(std::lgamma(x)).epsilon(1e-12));
    }
}

TEST_CASE("ln_multigamma domain error") {
    CHECK_THROWS_AS(ln_multigamma(2, 0.5), DomainError);
}

TEST_CASE("log_det and solve through Cholesky") {
    std::mt19937_64 rng(3);
    const Eigen::MatrixXd a = testutil::random_spd(rng, 4);
    CHECK(log_det_spd(a) == doctest::Approx(std::log(a.determinant())).epsilon(1e-9));
    const Eigen::VectorXd b = Eigen::VectorXd::Random(4);
    const Eigen::VectorXd x = solve_spd(a, b);
    CHECK((a * x - b).norm() <= 1e-9 * b.norm());
    CHECK(mahalanobis_sq(a, b) == doctest::Approx(b.dot(a.inverse() * b)).epsilon(1e-9));
}

TEST_CASE("log_sum_exp") {
    CHECK(log_sum_exp({}) == -std::numeric_limits<double>::infinity());
    CHECK(log_sum_exp({std::log(2.0), std::log(3.0)}) ==
          doctest::Approx(std::log(5.0)).epsilon(1e-12));
    CHECK(log_sum_exp({-1000.0, -1000.0}) ==
          doctest::Approx(-1000.0 + std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("chi2 quantile sanity") {
    CHECK(chi2_quantile(2, 0.999) == doctest::Approx(13.8155).epsilon(1e-4));
}

TEST_CASE("gaussian rectangle probability") {
    const Eigen::Vector2d mean(1.0, -2.0);
    Eigen::Matrix2d cov;
    cov << 4.0, 1.0, 1.0, 3.0;
    // whole plane
    CHECK(gaussian_rect_prob(mean, cov, -1e6, 1e6, -1e6, 1e6) ==
          doctest::Approx(1.0).epsilon(1e-9));
    // half plane through the mean
    CHECK(gaussian_rect_prob(mean, cov, mean(0), 1e6, -1e6, 1e6) ==
          doctest::Approx(0.5).epsilon(1e-6));
    // Monte-Carlo cross-check on a finite rectangle
    std::mt19937_64 rng(7);
    int inside = 0;
    const int n = 400000;
    for (int i = 0; i < n; ++i) {
        const Eigen::VectorXd s = testutil::sample_gaussian(rng, mean, cov);
        if (s(0) > -1.0 && s(0) < 2.5 && s(1) > -4.0 && s(1) < 0.0) ++inside;
    }
    const double mc = static_cast<double>(inside) / n;
    const double p = gaussian_rect_prob(mean, cov, -1.0, 2.5, -4.0, 0.0);
    CHECK(std::abs(p - mc) < 4.0 * std::sqrt(mc * (1.0 - mc) / n));
}
