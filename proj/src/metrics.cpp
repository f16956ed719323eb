#include "pmbm/metrics.hpp"

#include <cmath>
#include <limits>

namespace pmbm {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

/// Minimum-cost assignment of each row to a distinct column, n_rows <= n_cols.
/// Potentials-based Hungarian; +inf marks forbidden pairs.
std::optional<AssignmentResult> solve_assignment(const std::vector<std::vector<double>>& a,
                                                 int n, int m) {
    std::vector<double> u(static_cast<size_t>(n) + 1, 0.0);
    std::vector<double> v(static_cast<size_t>(m) + 1, 0.0);
    std::vector<int> p(static_cast<size_t>(m) + 1, 0);
    std::vector<int> way(static_cast<size_t>(m) + 1, 0);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(static_cast<size_t>(m) + 1, kInf);
        std::vector<bool> used(static_cast<size_t>(m) + 1, false);
        do {
            used[static_cast<size_t>(j0)] = true;
            const int i0 = p[static_cast<size_t>(j0)];
            double delta = kInf;
            int j1 = -1;
            for (int j = 1; j <= m; ++j) {
                if (used[static_cast<size_t>(j)]) continue;
                const double cur = a[static_cast<size_t>(i0) - 1][static_cast<size_t>(j) - 1] -
                                   u[static_cast<size_t>(i0)] - v[static_cast<size_t>(j)];
                if (cur < minv[static_cast<size_t>(j)]) {
                    minv[static_cast<size_t>(j)] = cur;
                    way[static_cast<size_t>(j)] = j0;
                }
                if (minv[static_cast<size_t>(j)] < delta) {
                    delta = minv[static_cast<size_t>(j)];
                    j1 = j;
                }
            }
            if (!std::isfinite(delta)) return std::nullopt;
            for (int j = 0; j <= m; ++j) {
                if (used[static_cast<size_t>(j)]) {
                    u[static_cast<size_t>(p[static_cast<size_t>(j)])] += delta;
                    v[static_cast<size_t>(j)] -= delta;
                } else {
                    minv[static_cast<size_t>(j)] -= delta;
                }
            }
            j0 = j1;
        } while (p[static_cast<size_t>(j0)] != 0);
        do {
            const int j1 = way[static_cast<size_t>(j0)];
            p[static_cast<size_t>(j0)] = p[static_cast<size_t>(j1)];
            j0 = j1;
        } while (j0 != 0);
    }
    AssignmentResult out;
    out.assignment.assign(static_cast<size_t>(n), -1);
    for (int j = 1; j <= m; ++j) {
        if (p[static_cast<size_t>(j)] > 0) {
            out.assignment[static_cast<size_t>(p[static_cast<size_t>(j)]) - 1] = j - 1;
        }
    }
    for (int i = 0; i < n; ++i) {
        const double c = a[static_cast<size_t>(i)][static_cast<size_t>(out.assignment[static_cast<size_t>(i)])];
        if (!std::isfinite(c)) return std::nullopt;
        out.total_cost += c;
    }
    return out;
}

}  // namespace

double gwd(const Footprint& a, const Footprint& b) {
    const Mat2 a_sqrt = math::sqrtm_psd(a.extent);
    const Mat2 cross = math::sqrtm_psd(a_sqrt * b.extent * a_sqrt);
    return (a.position - b.position).squaredNorm() +
           (a.extent + b.extent - 2.0 * cross).trace();
}

AssignmentResult hungarian(const std::vector<std::vector<double>>& costs) {
    auto res = try_hungarian(costs);
    if (!res) throw Infeasible();
    return *res;
}

std::optional<AssignmentResult> try_hungarian(const std::vector<std::vector<double>>& costs) {
    const int n = static_cast<int>(costs.size());
    if (n == 0) return AssignmentResult{};
    return solve_assignment(costs, n, static_cast<int>(costs[0].size()));
}

GospaResult gospa(const std::vector<Footprint>& truth, const std::vector<Footprint>& est,
                  double c, double p) {
    const int n = static_cast<int>(truth.size());
    const int m = static_cast<int>(est.size());
    GospaResult out;
    if (n == 0 && m == 0) return out;

    const double half_cp = 0.5 * std::pow(c, p);
    // (n+m) square matrix: real block forbids pairs at or beyond the cut-off,
    // dummy arcs carry the c^p/2 penalty for unassigned members.
    const int size = n + m;
    std::vector<std::vector<double>> cost(static_cast<size_t>(size),
                                          std::vector<double>(static_cast<size_t>(size), kInf));
    std::vector<std::vector<double>> base(static_cast<size_t>(n),
                                          std::vector<double>(static_cast<size_t>(m), 0.0));
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < m; ++j) {
            const double d = gwd(truth[static_cast<size_t>(i)], est[static_cast<size_t>(j)]);
            base[static_cast<size_t>(i)][static_cast<size_t>(j)] = d;
            if (d < c) cost[static_cast<size_t>(i)][static_cast<size_t>(j)] = std::pow(d, p);
        }
    }
    for (int i = 0; i < n; ++i) cost[static_cast<size_t>(i)][static_cast<size_t>(m + i)] = half_cp;
    for (int j = 0; j < m; ++j) cost[static_cast<size_t>(n + j)][static_cast<size_t>(j)] = half_cp;
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < n; ++j) {
            cost[static_cast<size_t>(n + i)][static_cast<size_t>(m + j)] = 0.0;
        }
    }

    const AssignmentResult sol = hungarian(cost);
    for (int i = 0; i < n; ++i) {
        const int j = sol.assignment[static_cast<size_t>(i)];
        if (j < m) {
            out.localisation += std::pow(base[static_cast<size_t>(i)][static_cast<size_t>(j)], p);
        } else {
            out.missed += half_cp;
        }
    }
    for (int j = 0; j < m; ++j) {
        bool matched = false;
        for (int i = 0; i < n; ++i) {
            if (sol.assignment[static_cast<size_t>(i)] == j) matched = true;
        }
        if (!matched) out.false_ += half_cp;
    }
    const double sum = out.localisation + out.missed + out.false_;
    out.total = (p == 1.0) ? sum : std::pow(sum, 1.0 / p);
    return out;
}

}  // namespace pmbm
