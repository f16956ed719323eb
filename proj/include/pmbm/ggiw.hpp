#pragma once

#include "pmbm/mathkit.hpp"

#include <Eigen/Dense>
#include <optional>
#include <utility>
#include <vector>

namespace pmbm {

inline constexpr int kExtentDim = 2;   // d
inline constexpr int kKinDim = 4;      // n_x: [px py vx vy]

using Vec2 = Eigen::Vector2d;
using Vec4 = Eigen::Vector4d;
using Mat2 = Eigen::Matrix2d;
using Mat4 = Eigen::Matrix4d;
using MeasMat = Eigen::Matrix<double, 2, 4>;
using MeasurementSet = std::vector<Vec2>;

/// Gamma x Gaussian x inverse-Wishart parameters for one extended target.
struct GGIWParams {
    double alpha = 1.0;  // gamma shape
    double beta = 1.0;   // gamma rate
    Vec4 m = Vec4::Zero();
    Mat4 P = Mat4::Identity();
    double v = 10.0;     // inverse-Wishart dof, must stay > 2d+2
    Mat2 V = Mat2::Identity();

    /// Mean extent V/(v - 2d - 2).
    Mat2 mean_extent() const { return V / (v - 2.0 * kExtentDim - 2.0); }
    /// Mean measurement rate alpha/beta.
    double mean_rate() const { return alpha / beta; }
    Vec2 position() const { return m.head<2>(); }
};

struct WeightedGGIW {
    double log_w = 0.0;
    GGIWParams params;
};

/// Constant-velocity motion model with gamma forgetting and extent decay.
struct MotionModel {
    double Ts = 1.0;       // sampling time [s]
    double sigma_a = 0.2;  // acceleration std [m/s^2]
    double tau = 5.0;      // extent maneuvering correlation constant [s]
    double eta = 1.25;     // measurement-rate forgetting factor (>= 1)

    Mat4 transition() const {
        Mat4 f = Mat4::Identity();
        f(0, 2) = Ts;
        f(1, 3) = Ts;
        return f;
    }

    Mat4 process_noise() const {
        Eigen::Matrix<double, 4, 2> g;
        g << 0.5 * Ts * Ts, 0, 0, 0.5 * Ts * Ts, Ts, 0, 0, Ts;
        return sigma_a * sigma_a * g * g.transpose();
    }
};

/// Probability-of-detection field: constant, or a rectangular grid over the
/// surveillance area (used for occlusion modelling).
class DetectionField {
public:
    DetectionField() = default;
    explicit DetectionField(double constant_pd) : constant_pd_(constant_pd) {}
    DetectionField(double xmin, double xmax, double ymin, double ymax, int nx, int ny,
                   double fill);

    double at(const Vec2& pos) const;

    bool is_grid() const { return !grid_.empty(); }
    int nx() const { return nx_; }
    int ny() const { return ny_; }
    Vec2 cell_center(int ix, int iy) const;
    double& cell(int ix, int iy) { return grid_[static_cast<size_t>(iy) * nx_ + ix]; }
    double cell(int ix, int iy) const { return grid_[static_cast<size_t>(iy) * nx_ + ix]; }
    void fill(double value);

private:
    double constant_pd_ = 0.9;
    double xmin_ = 0, xmax_ = 0, ymin_ = 0, ymax_ = 0;
    int nx_ = 0, ny_ = 0;
    std::vector<double> grid_;
};

struct SensorModel {
    MeasMat H = (MeasMat() << 1, 0, 0, 0, 0, 1, 0, 0).finished();
    double clutter_rate = 10.0;  // lambda, expected clutter per scan
    double area = 4.0e4;         // surveillance area A [m^2]
    DetectionField p_detect{0.9};
    double p_survive = 0.99;
    double gate_prob = 0.999;

    double log_clutter_intensity() const {
        return std::log(clutter_rate) - std::log(area);
    }
    double pd_at(const Vec2& pos) const { return p_detect.at(pos); }
};

/// A concrete extended-target state (rate, kinematics, extent), used for
/// density evaluation and sampling.
struct TargetState {
    double rate = 10.0;
    Vec4 kin = Vec4::Zero();
    Mat2 extent = Mat2::Identity();
};

// ---- Single-target recursion ----

GGIWParams ggiw_predict(const GGIWParams& zeta, const MotionModel& model);

/// Bayes update with a nonempty measurement cell. Returns the updated
/// parameters and the log predicted likelihood.
std::pair<GGIWParams, double> ggiw_update(const GGIWParams& zeta_plus,
                                          const MeasurementSet& cell, const MeasMat& H);

/// Effective missed-detection probability and the two induced gamma branches.
struct MissedDetectionFactors {
    double qd = 1.0;     // 1 - pD + pD (beta/(beta+1))^alpha
    double log_w1 = 0.0; // no-detection branch (params unchanged)
    double log_w2 = 0.0; // zero-measurement branch (beta + 1)
    GGIWParams branch1;
    GGIWParams branch2;
};
MissedDetectionFactors neg_detection_factors(const GGIWParams& zeta, double pd);

/// Moment-matched single gamma for a weighted gamma mixture.
/// Weights are linear and must sum to 1.
std::pair<double, double> gamma_mixture_reduce(
    const std::vector<std::tuple<double, double, double>>& weighted_components);

/// KLD(a || b) for GGIW densities; the density factorizes so the divergence is
/// the sum of the gamma, Gaussian and inverse-Wishart terms.
double ggiw_kld(const GGIWParams& a, const GGIWParams& b);

struct MixtureReduceResult {
    std::vector<WeightedGGIW> components;
    double pruned_mass = 0.0;  // linear mass removed by pruning
};

/// Prune below prune_logw, greedily merge pairs with KLD below merge_thresh
/// (merged component keeps the heavier member's parameters, weights add),
/// cap the component count.
MixtureReduceResult ggiw_mixture_reduce(std::vector<WeightedGGIW> mix, double merge_thresh,
                                        double prune_logw, size_t cap);

// ---- Density evaluation (used by the conjugacy checks) ----

double gamma_logpdf(double x, double alpha, double beta);
double gaussian_logpdf(const Eigen::VectorXd& x, const Eigen::VectorXd& mean,
                       const Eigen::MatrixXd& cov);
double inverse_wishart_logpdf(const Mat2& x, double v, const Mat2& V);
double ggiw_logpdf(const TargetState& x, const GGIWParams& zeta);

/// log of the conditional measurement-set likelihood for a detected target,
/// exp(-rate) prod_z rate * N(z; H xi, X).
double measurement_set_loglik(const MeasurementSet& cell, const TargetState& x,
                              const MeasMat& H);

}  // namespace pmbm
