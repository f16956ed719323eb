#pragma once

#include "pmbm/ggiw.hpp"
#include "pmbm/mathkit.hpp"

#include <random>

namespace pmbm::testutil {

inline Eigen::MatrixXd random_spd(std::mt19937_64& rng, int n, double scale = 1.0) {
    std::normal_distribution<double> nd(0.0, 1.0);
    Eigen::MatrixXd a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = nd(rng);
    return scale * (a * a.transpose() + 0.1 * n * Eigen::MatrixXd::Identity(n, n));
}

inline GGIWParams random_ggiw(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::normal_distribution<double> nd(0.0, 1.0);
    GGIWParams z;
    z.alpha = 2.0 + 20.0 * u(rng);
    z.beta = 0.5 + 2.0 * u(rng);
    for (int i = 0; i < 4; ++i) z.m(i) = 10.0 * nd(rng);
    z.P = random_spd(rng, 4, 1.0);
    z.v = 2.0 * kExtentDim + 3.0 + 15.0 * u(rng);
    z.V = random_spd(rng, 2, 2.0) * (z.v - 2.0 * kExtentDim - 2.0);
    return z;
}

inline double sample_gamma(std::mt19937_64& rng, double alpha, double beta) {
    std::gamma_distribution<double> g(alpha, 1.0 / beta);
    return g(rng);
}

inline Eigen::VectorXd sample_gaussian(std::mt19937_64& rng, const Eigen::VectorXd& mean,
                                       const Eigen::MatrixXd& cov) {
    std::normal_distribution<double> nd(0.0, 1.0);
    Eigen::VectorXd u(mean.size());
    for (int i = 0; i < u.size(); ++i) u(i) = nd(rng);
    return mean + math::chol_psd(cov) * u;
}

/// Wishart sample via Bartlett decomposition.
inline Eigen::MatrixXd sample_wishart(std::mt19937_64& rng, const Eigen::MatrixXd& sigma,
                                      double dof) {
    const int n = static_cast<int>(sigma.rows());
    std::normal_distribution<double> nd(0.0, 1.0);
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        std::chi_squared_distribution<double> chi(dof - i);
        a(i, i) = std::sqrt(chi(rng));
        for (int j = 0; j < i; ++j) a(i, j) = nd(rng);
    }
    const Eigen::MatrixXd l = math::chol_psd(sigma);
    const Eigen::MatrixXd la = l * a;
    return la * la.transpose();
}

/// Inverse-Wishart sample in the (v, V) parametrization used by GGIWParams
/// (standard dof is v - d - 1).
inline Eigen::MatrixXd sample_inverse_wishart(std::mt19937_64& rng, double v,
                                              const Eigen::MatrixXd& V) {
    const int d = static_cast<int>(V.rows());
    const double nu = v - d - 1.0;
    const Eigen::MatrixXd w = sample_wishart(rng, V.inverse(), nu);
    return w.inverse();
}

inline TargetState sample_state(std::mt19937_64& rng, const GGIWParams& z) {
    TargetState x;
    x.rate = sample_gamma(rng, z.alpha, z.beta);
    x.kin = sample_gaussian(rng, z.m, z.P);
    x.extent = sample_inverse_wishart(rng, z.v, z.V);
    return x;
}

}  // namespace pmbm::testutil
