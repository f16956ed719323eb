#include "pmbm/mathkit.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace pmbm::math {

double ln_multigamma(int d, double x) {
    if (x <= 0.5 * (d - 1)) {
        throw DomainError("ln_multigamma: x <= (d-1)/2");
    }
    double out = 0.25 * d * (d - 1) * std::log(M_PI);
    for (int i = 1; i <= d; ++i) {
        out += std::lgamma(x + 0.5 * (1 - i));
    }
    return out;
}

double log_sum_exp(const std::vector<double>& log_vals) {
    if (log_vals.empty()) return -std::numeric_limits<double>::infinity();
    const double mx = *std::max_element(log_vals.begin(), log_vals.end());
    if (!std::isfinite(mx)) return mx;
    double acc = 0.0;
    for (double v : log_vals) acc += std::exp(v - mx);
    return mx + std::log(acc);
}

double chi2_quantile(int d, double p) {
    boost::math::chi_squared dist(static_cast<double>(d));
    return boost::math::quantile(dist, p);
}

namespace {

double phi(double x) {
    static const boost::math::normal_distribution<double> n01;
    return boost::math::cdf(n01, x);
}

// Genz's algorithm for the standard bivariate normal tail
// P(X > dh, Y > dk) with correlation r.
double bvnu(double dh, double dk, double r) {
    static const double w6[] = {0.1713244923791705, 0.3607615730481384, 0.4679139345726904};
    static const double x6[] = {0.9324695142031522, 0.6612093864662647, 0.2386191860831970};
    static const double w12[] = {0.04717533638651177, 0.1069393259953183, 0.1600783285433464,
                                 0.2031674267230659,  0.2334925365383547, 0.2491470458134029};
    static const double x12[] = {0.9815606342467191, 0.9041172563704750, 0.7699026741943050,
                                 0.5873179542866171, 0.3678314989981802, 0.1252334085114692};
    static const double w20[] = {0.01761400713915212, 0.04060142980038694, 0.06267204833410906,
                                 0.08327674157670475, 0.1019301198172404,  0.1181945319615184,
                                 0.1316886384491766,  0.1420961093183821,  0.1491729864726037,
                                 0.1527533871307259};
    static const double x20[] = {0.9931285991850949, 0.9639719272779138, 0.9122344282513259,
                                 0.8391169718222188, 0.7463319064601508, 0.6360536807265150,
                                 0.5108670019508271, 0.3737060887154196, 0.2277858511416451,
                                 0.07652652113349733};

    const double* w;
    const double* x;
    int ng;
    if (std::abs(r) < 0.3) {
        w = w6; x = x6; ng = 3;
    } else if (std::abs(r) < 0.75) {
        w = w12; x = x12; ng = 6;
    } else {
        w = w20; x = x20; ng = 10;
    }

    const double h = dh;
    const double k = dk;
    double hk = h * k;
    double bvn = 0.0;
    if (std::abs(r) < 0.925) {
        const double hs = 0.5 * (h * h + k * k);
        const double asr = std::asin(r);
        for (int i = 0; i < ng; ++i) {
            for (int is = -1; is <= 1; is += 2) {
                const double sn = std::sin(0.5 * asr * (is * x[i] + 1.0));
                bvn += w[i] * std::exp((sn * hk - hs) / (1.0 - sn * sn));
            }
        }
        bvn = bvn * asr / (4.0 * M_PI) + phi(-h) * phi(-k);
    } else {
        double hh = h;
        double kk = k;
        if (r < 0.0) {
            kk = -kk;
            hk = -hk;
        }
        if (std::abs(r) < 1.0) {
            const double as = (1.0 - r) * (1.0 + r);
            double a = std::sqrt(as);
            const double bs = (hh - kk) * (hh - kk);
            const double c = (4.0 - hk) / 8.0;
            const double d = (12.0 - hk) / 16.0;
            const double asr = -(bs / as + hk) / 2.0;
            if (asr > -100.0) {
                bvn = a * std::exp(asr) *
                      (1.0 - c * (bs - as) * (1.0 - d * bs / 5.0) / 3.0 + c * d * as * as / 5.0);
            }
            if (-hk < 100.0) {
                const double b = std::sqrt(bs);
                bvn -= std::exp(-hk / 2.0) * std::sqrt(2.0 * M_PI) * phi(-b / a) * b *
                       (1.0 - c * bs * (1.0 - d * bs / 5.0) / 3.0);
            }
            a /= 2.0;
            for (int i = 0; i < ng; ++i) {
                for (int is = -1; is <= 1; is += 2) {
                    const double xs = a * (is * x[i] + 1.0);
                    const double xs2 = xs * xs;
                    const double rs = std::sqrt(1.0 - xs2);
                    const double asr2 = -(bs / xs2 + hk) / 2.0;
                    if (asr2 > -100.0) {
                        bvn += a * w[i] * std::exp(asr2) *
                               (std::exp(-hk * (1.0 - rs) / (2.0 * (1.0 + rs))) / rs -
                                (1.0 + c * xs2 * (1.0 + d * xs2)));
                    }
                }
            }
            bvn = -bvn / (2.0 * M_PI);
        }
        if (r > 0.0) {
            bvn += phi(-std::max(hh, kk));
        } else {
            bvn = -bvn;
            if (kk > hh) bvn += phi(kk) - phi(hh);
        }
    }
    return std::clamp(bvn, 0.0, 1.0);
}

// P(X <= h, Y <= k) for standard bivariate normal with correlation r.
double bvn_cdf(double h, double k, double r) { return bvnu(-h, -k, r); }

}  // namespace

double gaussian_rect_prob(const Eigen::Vector2d& mean, const Eigen::Matrix2d& cov,
                          double xlo, double xhi, double ylo, double yhi) {
    const double sx = std::sqrt(std::max(cov(0, 0), 1e-300));
    const double sy = std::sqrt(std::max(cov(1, 1), 1e-300));
    const double r = std::clamp(cov(0, 1) / (sx * sy), -0.9999999, 0.9999999);
    const double a1 = (xlo - mean(0)) / sx;
    const double b1 = (xhi - mean(0)) / sx;
    const double a2 = (ylo - mean(1)) / sy;
    const double b2 = (yhi - mean(1)) / sy;
    const double p = bvn_cdf(b1, b2, r) - bvn_cdf(a1, b2, r) - bvn_cdf(b1, a2, r) +
                     bvn_cdf(a1, a2, r);
    return std::clamp(p, 0.0, 1.0);
}

}  // namespace pmbm::math
