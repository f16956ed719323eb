#pragma once

#include "pmbm/ggiw.hpp"

#include <optional>
#include <stdexcept>
#include <vector>

namespace pmbm {

class Infeasible : public std::runtime_error {
public:
    Infeasible() : std::runtime_error("no finite-cost assignment exists") {}
};

/// A (position, extent) pair as scored by the multi-object metric.
struct Footprint {
    Vec2 position = Vec2::Zero();
    Mat2 extent = Mat2::Identity();
};

/// Gaussian Wasserstein base distance in its squared form,
/// ||p - p'||^2 + tr(X + X' - 2 (X^1/2 X' X^1/2)^1/2).
double gwd(const Footprint& a, const Footprint& b);

struct AssignmentResult {
    std::vector<int> assignment;  // assignment[row] = column
    double total_cost = 0.0;
};

/// Minimum-cost perfect assignment of a square cost matrix; +inf entries mark
/// forbidden pairs. Deterministic lexicographic tie-break.
/// Throws Infeasible when every perfect assignment has infinite cost.
AssignmentResult hungarian(const std::vector<std::vector<double>>& costs);

/// hungarian without the exception: empty optional when infeasible.
std::optional<AssignmentResult> try_hungarian(const std::vector<std::vector<double>>& costs);

struct GospaResult {
    double total = 0.0;
    double localisation = 0.0;
    double missed = 0.0;
    double false_ = 0.0;
};

/// GOSPA with the squared-form GWD base distance, cut-off c, order p.
/// Decomposition holds exactly for p = 1.
GospaResult gospa(const std::vector<Footprint>& truth, const std::vector<Footprint>& est,
                  double c, double p);

}  // namespace pmbm
