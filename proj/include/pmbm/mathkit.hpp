#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace pmbm::math {

class NotPositiveDefinite : public std::runtime_error {
public:
    explicit NotPositiveDefinite(const std::string& what) : std::runtime_error(what) {}
};

class NotPositiveSemiDefinite : public std::runtime_error {
public:
    explicit NotPositiveSemiDefinite(const std::string& what) : std::runtime_error(what) {}
};

class DomainError : public std::runtime_error {
public:
    explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

/// (M + M^T)/2. Factorizations drift off symmetric after repeated updates.
template <typename Derived>
typename Derived::PlainObject symmetrize(const Eigen::MatrixBase<Derived>& m) {
    return 0.5 * (m + m.transpose());
}

/// Lower Cholesky factor of a symmetric positive definite matrix.
/// A jitter of 1e-12*trace is added to the diagonal before factorization.
/// Throws NotPositiveDefinite if a pivot is still non-positive.
template <typename Derived>
typename Derived::PlainObject chol_psd(const Eigen::MatrixBase<Derived>& m) {
    using Mat = typename Derived::PlainObject;
    Mat s = symmetrize(m);
    const double jitter = 1e-12 * std::max(s.trace(), 0.0);
    s.diagonal().array() += jitter;
    Eigen::LLT<Mat> llt(s);
    if (llt.info() != Eigen::Success) {
        throw NotPositiveDefinite("chol_psd: matrix is not positive definite");
    }
    return llt.matrixL();
}

/// Symmetric PSD square root via eigendecomposition.
/// Throws NotPositiveSemiDefinite if an eigenvalue < -1e-10*trace.
template <typename Derived>
typename Derived::PlainObject sqrtm_psd(const Eigen::MatrixBase<Derived>& m) {
    using Mat = typename Derived::PlainObject;
    const Mat s = symmetrize(m);
    Eigen::SelfAdjointEigenSolver<Mat> es(s);
    if (es.info() != Eigen::Success) {
        throw NotPositiveSemiDefinite("sqrtm_psd: eigendecomposition failed");
    }
    const double floor = -1e-10 * std::max(s.trace(), 0.0);
    auto ev = es.eigenvalues().eval();
    for (int i = 0; i < ev.size(); ++i) {
        if (ev(i) < floor) {
            throw NotPositiveSemiDefinite("sqrtm_psd: negative eigenvalue");
        }
        ev(i) = std::sqrt(std::max(ev(i), 0.0));
    }
    return symmetrize(es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose());
}

/// log of the multivariate gamma function Gamma_d(x),
/// ln Gamma_d(x) = d(d-1)/4 ln(pi) + sum_i ln Gamma(x + (1-i)/2).
/// Throws DomainError when x <= (d-1)/2.
double ln_multigamma(int d, double x);

/// log|M| from Cholesky diagonals; M must be SPD.
template <typename Derived>
double log_det_spd(const Eigen::MatrixBase<Derived>& m) {
    return 2.0 * chol_psd(m).diagonal().array().log().sum();
}

/// Solve M x = b with M SPD, through Cholesky.
template <typename DerivedM, typename DerivedB>
typename DerivedB::PlainObject solve_spd(const Eigen::MatrixBase<DerivedM>& m,
                                         const Eigen::MatrixBase<DerivedB>& b) {
    const auto l = chol_psd(m);
    typename DerivedB::PlainObject y = l.template triangularView<Eigen::Lower>().solve(b);
    return l.transpose().template triangularView<Eigen::Upper>().solve(y);
}

/// e^T M^-1 e for SPD M.
template <typename DerivedM, typename DerivedE>
double mahalanobis_sq(const Eigen::MatrixBase<DerivedM>& m,
                      const Eigen::MatrixBase<DerivedE>& e) {
    const auto l = chol_psd(m);
    return l.template triangularView<Eigen::Lower>().solve(e.eval()).squaredNorm();
}

/// log(sum_i exp(v_i)); -inf for an empty input.
double log_sum_exp(const std::vector<double>& log_vals);

/// Chi-square quantile (inverse CDF) with d degrees of freedom.
double chi2_quantile(int d, double p);

/// Standard bivariate normal rectangle probability
/// P(x in [xlo,xhi], y in [ylo,yhi]) for N(mean, cov), cov SPD 2x2.
double gaussian_rect_prob(const Eigen::Vector2d& mean, const Eigen::Matrix2d& cov,
                          double xlo, double xhi, double ylo, double yhi);

}  // namespace pmbm::math
