#include "pmbm/ggiw.hpp"

#include <boost/math/special_functions/digamma.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace pmbm {

using math::chol_psd;
using math::log_det_spd;
using math::ln_multigamma;
using math::solve_spd;
using math::sqrtm_psd;
using math::symmetrize;

// ---- DetectionField ----

DetectionField::DetectionField(double xmin, double xmax, double ymin, double ymax, int nx,
                               int ny, double fill)
    : xmin_(xmin), xmax_(xmax), ymin_(ymin), ymax_(ymax), nx_(nx), ny_(ny),
      grid_(static_cast<size_t>(nx) * ny, fill) {}

double DetectionField::at(const Vec2& pos) const {
    if (grid_.empty()) return constant_pd_;
    const double fx = (pos.x() - xmin_) / (xmax_ - xmin_) * nx_;
    const double fy = (pos.y() - ymin_) / (ymax_ - ymin_) * ny_;
    const int ix = std::clamp(static_cast<int>(std::floor(fx)), 0, nx_ - 1);
    const int iy = std::clamp(static_cast<int>(std::floor(fy)), 0, ny_ - 1);
    return cell(ix, iy);
}

Vec2 DetectionField::cell_center(int ix, int iy) const {
    const double dx = (xmax_ - xmin_) / nx_;
    const double dy = (ymax_ - ymin_) / ny_;
    return {xmin_ + (ix + 0.5) * dx, ymin_ + (iy + 0.5) * dy};
}

void DetectionField::fill(double value) {
    std::fill(grid_.begin(), grid_.end(), value);
}

// ---- Prediction ----

GGIWParams ggiw_predict(const GGIWParams& zeta, const MotionModel& model) {
    const double decay = std::exp(-model.Ts / model.tau);
    const Mat4 f = model.transition();
    GGIWParams out;
    out.alpha = zeta.alpha / model.eta;
    out.beta = zeta.beta / model.eta;
    out.m = f * zeta.m;
    out.P = symmetrize(f * zeta.P * f.transpose() + model.process_noise());
    out.v = 2.0 * kExtentDim + 2.0 + decay * (zeta.v - 2.0 * kExtentDim - 2.0);
    out.V = decay * zeta.V;  // extent transform M is identity for constant velocity
    return out;
}

// ---- Update ----

std::pair<GGIWParams, double> ggiw_update(const GGIWParams& zp, const MeasurementSet& cell,
                                          const MeasMat& H) {
    const int n = static_cast<int>(cell.size());
    const int d = kExtentDim;

    Vec2 zbar = Vec2::Zero();
    for (const auto& z : cell) zbar += z;
    zbar /= n;
    Mat2 scatter = Mat2::Zero();
    for (const auto& z : cell) scatter += (z - zbar) * (z - zbar).transpose();

    const Mat2 xhat = zp.mean_extent();
    const Vec2 eps = zbar - H * zp.m;
    const Mat2 innov = symmetrize(H * zp.P * H.transpose() + xhat / n);
    // K = P_+ H^T S^-1, via Cholesky solve of S K^T = H P_+.
    const Eigen::Matrix<double, 2, 4> kt = solve_spd(innov, H * zp.P);
    const Eigen::Matrix<double, 4, 2> gain = kt.transpose();

    const Mat2 xhat_sqrt = sqrtm_psd(xhat);
    const Mat2 innov_sqrt_inv = solve_spd(sqrtm_psd(innov), Mat2::Identity());
    const Mat2 nterm = xhat_sqrt * innov_sqrt_inv * (eps * eps.transpose()) *
                       innov_sqrt_inv.transpose() * xhat_sqrt.transpose();

    GGIWParams out;
    out.alpha = zp.alpha + n;
    out.beta = zp.beta + 1.0;
    out.m = zp.m + gain * eps;
    out.P = symmetrize(zp.P - gain * H * zp.P);
    out.v = zp.v + n;
    out.V = symmetrize(zp.V + nterm + scatter);

    const double log_lik =
        -0.5 * d * (n * std::log(M_PI) + std::log(static_cast<double>(n))) +
        0.5 * (zp.v - d - 1.0) * log_det_spd(zp.V) -
        0.5 * (out.v - d - 1.0) * log_det_spd(out.V) +
        ln_multigamma(d, 0.5 * (out.v - d - 1.0)) -
        ln_multigamma(d, 0.5 * (zp.v - d - 1.0)) +
        0.5 * log_det_spd(xhat) - 0.5 * log_det_spd(innov) +
        std::lgamma(out.alpha) - std::lgamma(zp.alpha) +
        zp.alpha * std::log(zp.beta) - out.alpha * std::log(out.beta);

    return {out, log_lik};
}

// ---- Missed detection ----

MissedDetectionFactors neg_detection_factors(const GGIWParams& zeta, double pd) {
    MissedDetectionFactors out;
    const double log_zero_meas = zeta.alpha * (std::log(zeta.beta) - std::log(zeta.beta + 1.0));
    const double p_zero = pd * std::exp(log_zero_meas);
    out.qd = 1.0 - pd + p_zero;
    out.branch1 = zeta;
    out.branch2 = zeta;
    out.branch2.beta += 1.0;
    out.log_w1 = std::log(std::max(1.0 - pd, 0.0)) - std::log(out.qd);
    out.log_w2 = std::log(pd) + log_zero_meas - std::log(out.qd);
    return out;
}

std::pair<double, double> gamma_mixture_reduce(
    const std::vector<std::tuple<double, double, double>>& comps) {
    double mean = 0.0;
    double second = 0.0;
    for (const auto& [w, a, b] : comps) {
        const double mu = a / b;
        mean += w * mu;
        second += w * (a / (b * b) + mu * mu);
    }
    const double var = second - mean * mean;
    if (var <= 0.0 || !std::isfinite(var)) {
        // all components coincide (or a degenerate weight); keep the heaviest
        auto it = std::max_element(comps.begin(), comps.end(),
                                   [](const auto& l, const auto& r) {
                                       return std::get<0>(l) < std::get<0>(r);
                                   });
        return {std::get<1>(*it), std::get<2>(*it)};
    }
    return {mean * mean / var, mean / var};
}

// ---- KLD ----

namespace {

double gamma_kld(double a1, double b1, double a2, double b2) {
    return (a1 - a2) * boost::math::digamma(a1) - std::lgamma(a1) + std::lgamma(a2) +
           a2 * (std::log(b1) - std::log(b2)) + a1 * (b2 - b1) / b1;
}

double gaussian_kld(const Vec4& m1, const Mat4& p1, const Vec4& m2, const Mat4& p2) {
    const Mat4 sol = solve_spd(p2, p1);
    const Vec4 dm = m2 - m1;
    return 0.5 * (sol.trace() + math::mahalanobis_sq(p2, dm) - kKinDim + log_det_spd(p2) -
                  log_det_spd(p1));
}

double inverse_wishart_kld(double v1, const Mat2& V1, double v2, const Mat2& V2) {
    const int d = kExtentDim;
    const double nu1 = v1 - d - 1.0;
    const double nu2 = v2 - d - 1.0;
    double e_logdet = log_det_spd(V1) - d * std::log(2.0);
    for (int i = 1; i <= d; ++i) e_logdet -= boost::math::digamma(0.5 * (nu1 + 1.0 - i));
    const Mat2 v2_inv_v1 = solve_spd(V1, V2);  // V1^-1 V2, trace equals tr(V2 V1^-1)
    return 0.5 * nu1 * log_det_spd(V1) - 0.5 * nu2 * log_det_spd(V2) -
           0.5 * (nu1 - nu2) * d * std::log(2.0) - ln_multigamma(d, 0.5 * nu1) +
           ln_multigamma(d, 0.5 * nu2) - 0.5 * (nu1 - nu2) * e_logdet -
           0.5 * nu1 * (d - v2_inv_v1.trace());
}

}  // namespace

double ggiw_kld(const GGIWParams& a, const GGIWParams& b) {
    const double kld = gamma_kld(a.alpha, a.beta, b.alpha, b.beta) +
                       gaussian_kld(a.m, a.P, b.m, b.P) +
                       inverse_wishart_kld(a.v, a.V, b.v, b.V);
    return std::max(kld, 0.0);
}

// ---- Mixture reduction ----

MixtureReduceResult ggiw_mixture_reduce(std::vector<WeightedGGIW> mix, double merge_thresh,
                                        double prune_logw, size_t cap) {
    MixtureReduceResult out;
    std::vector<WeightedGGIW> kept;
    for (auto& c : mix) {
        if (c.log_w < prune_logw) {
            out.pruned_mass += std::exp(c.log_w);
        } else {
            kept.push_back(std::move(c));
        }
    }
    std::sort(kept.begin(), kept.end(),
              [](const WeightedGGIW& l, const WeightedGGIW& r) { return l.log_w > r.log_w; });

    // Greedy merge: heaviest unabsorbed component absorbs all close ones.
    std::vector<bool> absorbed(kept.size(), false);
    std::vector<WeightedGGIW> merged;
    for (size_t i = 0; i < kept.size(); ++i) {
        if (absorbed[i]) continue;
        WeightedGGIW head = kept[i];
        double mass = std::exp(head.log_w);
        for (size_t j = i + 1; j < kept.size(); ++j) {
            if (absorbed[j]) continue;
            if (ggiw_kld(kept[j].params, head.params) < merge_thresh) {
                mass += std::exp(kept[j].log_w);
                absorbed[j] = true;
            }
        }
        head.log_w = std::log(mass);
        merged.push_back(head);
    }
    std::sort(merged.begin(), merged.end(),
              [](const WeightedGGIW& l, const WeightedGGIW& r) { return l.log_w > r.log_w; });

    // Cap: fold surplus tail components into the closest survivor so no mass
    // is lost beyond what pruning reported.
    if (merged.size() > cap && cap > 0) {
        for (size_t j = cap; j < merged.size(); ++j) {
            size_t best = 0;
            double best_kld = std::numeric_limits<double>::infinity();
            for (size_t i = 0; i < cap; ++i) {
                const double kld = ggiw_kld(merged[j].params, merged[i].params);
                if (kld < best_kld) {
                    best_kld = kld;
                    best = i;
                }
            }
            merged[best].log_w = math::log_sum_exp({merged[best].log_w, merged[j].log_w});
        }
        merged.resize(cap);
    }
    out.components = std::move(merged);
    return out;
}

// ---- Density evaluation ----

double gamma_logpdf(double x, double alpha, double beta) {
    return alpha * std::log(beta) - std::lgamma(alpha) + (alpha - 1.0) * std::log(x) -
           beta * x;
}

double gaussian_logpdf(const Eigen::VectorXd& x, const Eigen::VectorXd& mean,
                       const Eigen::MatrixXd& cov) {
    const auto n = static_cast<double>(x.size());
    return -0.5 * (n * std::log(2.0 * M_PI) + log_det_spd(cov) +
                   math::mahalanobis_sq(cov, x - mean));
}

double inverse_wishart_logpdf(const Mat2& x, double v, const Mat2& V) {
    const int d = kExtentDim;
    const double nu = v - d - 1.0;
    const Mat2 x_inv_v = solve_spd(x, V);
    return 0.5 * nu * log_det_spd(V) - 0.5 * nu * d * std::log(2.0) -
           ln_multigamma(d, 0.5 * nu) - 0.5 * (nu + d + 1.0) * log_det_spd(x) -
           0.5 * x_inv_v.trace();
}

double ggiw_logpdf(const TargetState& x, const GGIWParams& zeta) {
    return gamma_logpdf(x.rate, zeta.alpha, zeta.beta) +
           gaussian_logpdf(x.kin, zeta.m, zeta.P) +
           inverse_wishart_logpdf(x.extent, zeta.v, zeta.V);
}

double measurement_set_loglik(const MeasurementSet& cell, const TargetState& x,
                              const MeasMat& H) {
    double out = -x.rate;
    const Vec2 center = H * x.kin;
    for (const auto& z : cell) {
        out += std::log(x.rate) + gaussian_logpdf(z, center, x.extent);
    }
    return out;
}

}  // namespace pmbm
