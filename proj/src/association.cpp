#include "pmbm/association.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <queue>
#include <set>

namespace pmbm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(static_cast<size_t>(n)) {
        for (int i = 0; i < n; ++i) parent[static_cast<size_t>(i)] = i;
    }
    int find(int a) {
        while (parent[static_cast<size_t>(a)] != a) {
            parent[static_cast<size_t>(a)] = parent[static_cast<size_t>(parent[static_cast<size_t>(a)])];
            a = parent[static_cast<size_t>(a)];
        }
        return a;
    }
    void unite(int a, int b) { parent[static_cast<size_t>(find(a))] = find(b); }
};

double gate_dist_sq(const GGIWParams& z, const Vec2& meas, const MeasMat& H) {
    const Mat2 s = math::symmetrize(H * z.P * H.transpose() + z.mean_extent());
    return math::mahalanobis_sq(s, meas - H * z.m);
}

}  // namespace

GateResult gate(const std::vector<BernoulliTrack>& tracks, const PPPIntensity& ppp,
                const MeasurementSet& scan, const SensorModel& sensor, double gate_prob) {
    const double threshold = math::chi2_quantile(kExtentDim, gate_prob);
    GateResult out;
    out.track_gates.resize(tracks.size());
    out.ppp_gates.resize(ppp.components.size());
    for (size_t t = 0; t < tracks.size(); ++t) {
        for (size_t m = 0; m < scan.size(); ++m) {
            if (gate_dist_sq(tracks[t].mode(), scan[m], sensor.H) <= threshold) {
                out.track_gates[t].push_back(static_cast<int>(m));
            }
        }
    }
    for (size_t n = 0; n < ppp.components.size(); ++n) {
        for (size_t m = 0; m < scan.size(); ++m) {
            if (gate_dist_sq(ppp.components[n].params, scan[m], sensor.H) <= threshold) {
                out.ppp_gates[n].push_back(static_cast<int>(m));
            }
        }
    }
    return out;
}

std::vector<Group> group(const GateResult& gates, int n_tracks, int n_meas) {
    UnionFind uf(n_tracks + n_meas);
    for (int t = 0; t < n_tracks; ++t) {
        for (int m : gates.track_gates[static_cast<size_t>(t)]) uf.unite(t, n_tracks + m);
    }
    std::map<int, Group> groups;
    for (int t = 0; t < n_tracks; ++t) groups[uf.find(t)].tracks.push_back(t);
    for (int m = 0; m < n_meas; ++m) groups[uf.find(n_tracks + m)].measurements.push_back(m);
    std::vector<Group> out;
    for (auto& [root, g] : groups) out.push_back(std::move(g));
    return out;
}

std::vector<std::vector<std::vector<int>>> partition_measurements(
    const std::vector<Vec2>& points, const std::vector<double>& thresholds) {
    const int n = static_cast<int>(points.size());
    std::set<std::vector<std::vector<int>>> seen;
    std::vector<std::vector<std::vector<int>>> out;

    auto add_partition = [&](double delta) {
        UnionFind uf(n);
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) {
                if ((points[static_cast<size_t>(i)] - points[static_cast<size_t>(j)]).norm() < delta) {
                    uf.unite(i, j);
                }
            }
        }
        std::map<int, std::vector<int>> cells;
        for (int i = 0; i < n; ++i) cells[uf.find(i)].push_back(i);
        std::vector<std::vector<int>> partition;
        for (auto& [root, cell] : cells) partition.push_back(std::move(cell));
        std::sort(partition.begin(), partition.end());
        if (seen.insert(partition).second) out.push_back(partition);
    };

    add_partition(0.0);  // all singletons
    for (double delta : thresholds) add_partition(delta);
    return out;
}

// ---- Murty's k-best ranked assignment ----

namespace {

struct MurtyNode {
    std::vector<std::pair<int, int>> forced;
    std::vector<std::pair<int, int>> forbidden;
    RankedAssignment solution;
};

std::optional<RankedAssignment> solve_constrained(std::vector<std::vector<double>> costs,
                                                  const MurtyNode& node) {
    for (const auto& [r, c] : node.forbidden) {
        costs[static_cast<size_t>(r)][static_cast<size_t>(c)] = kInf;
    }
    for (const auto& [r, c] : node.forced) {
        for (size_t j = 0; j < costs[static_cast<size_t>(r)].size(); ++j) {
            if (static_cast<int>(j) != c) costs[static_cast<size_t>(r)][j] = kInf;
        }
        for (size_t i = 0; i < costs.size(); ++i) {
            if (static_cast<int>(i) != r) costs[i][static_cast<size_t>(c)] = kInf;
        }
    }
    const auto res = try_hungarian(costs);
    if (!res) return std::nullopt;
    return RankedAssignment{res->assignment, res->total_cost};
}

}  // namespace

std::vector<RankedAssignment> murty_kbest(const std::vector<std::vector<double>>& costs,
                                          int k) {
    std::vector<RankedAssignment> out;
    if (costs.empty()) {
        if (k >= 1) out.push_back({});
        return out;
    }

    auto cmp = [](const MurtyNode& a, const MurtyNode& b) {
        if (a.solution.total_cost != b.solution.total_cost) {
            return a.solution.total_cost > b.solution.total_cost;
        }
        return a.solution.assignment > b.solution.assignment;
    };
    std::priority_queue<MurtyNode, std::vector<MurtyNode>, decltype(cmp)> queue(cmp);

    MurtyNode root;
    auto root_sol = solve_constrained(costs, root);
    if (!root_sol) throw Infeasible();
    root.solution = *root_sol;
    queue.push(std::move(root));

    while (!queue.empty() && static_cast<int>(out.size()) < k) {
        MurtyNode node = queue.top();
        queue.pop();
        out.push_back(node.solution);

        // Partition the remaining space by the rows this solution assigned
        // freely (not forced).
        std::set<int> forced_rows;
        for (const auto& [r, c] : node.forced) forced_rows.insert(r);
        std::vector<std::pair<int, int>> prefix = node.forced;
        for (int r = 0; r < static_cast<int>(costs.size()); ++r) {
            if (forced_rows.count(r)) continue;
            MurtyNode child;
            child.forced = prefix;
            child.forbidden = node.forbidden;
            child.forbidden.emplace_back(r, node.solution.assignment[static_cast<size_t>(r)]);
            if (auto sol = solve_constrained(costs, child)) {
                child.solution = *sol;
                queue.push(std::move(child));
            }
            prefix.emplace_back(r, node.solution.assignment[static_cast<size_t>(r)]);
        }
    }
    std::stable_sort(out.begin(), out.end(), [](const RankedAssignment& a, const RankedAssignment& b) {
        if (a.total_cost != b.total_cost) return a.total_cost < b.total_cost;
        return a.assignment < b.assignment;
    });
    return out;
}

// ---- Composition into global associations ----

namespace {

using CellKey = std::vector<int>;

struct GroupSolution {
    // cells as (track index or -1, sorted measurement indices); missed tracks
    // are implicit.
    std::vector<std::pair<int, CellKey>> cells;
    double log_score = 0.0;

    std::vector<std::pair<int, CellKey>> canonical() const {
        auto c = cells;
        std::sort(c.begin(), c.end());
        return c;
    }
};

}  // namespace

namespace {

/// New-source cell likelihoods depend only on (ppp, scan, sensor); when the
/// provider is called once per parent hypothesis within a scan they can be
/// shared across calls.
struct NewSourceCache {
    const PPPIntensity* ppp = nullptr;
    const MeasurementSet* scan = nullptr;
    std::map<CellKey, double> values;

    void sync(const PPPIntensity& p, const MeasurementSet& s) {
        if (ppp != &p || scan != &s) {
            values.clear();
            ppp = &p;
            scan = &s;
        }
    }
};

std::vector<ScoredAssociation> build_associations_impl(
    const GlobalHypothesis& hyp, const PPPIntensity& ppp, const MeasurementSet& scan,
    const SensorModel& sensor, const AssociationConfig& config,
    std::map<CellKey, double>& new_source_cache) {
    const int n_tracks = static_cast<int>(hyp.tracks.size());
    const int n_meas = static_cast<int>(scan.size());
    const GateResult gates = gate(hyp.tracks, ppp, scan, sensor, config.gate_prob);

    // Missed-detection log-likelihood per track; the all-missed baseline.
    std::vector<double> log_miss(static_cast<size_t>(n_tracks));
    for (int t = 0; t < n_tracks; ++t) {
        log_miss[static_cast<size_t>(t)] =
            bernoulli_missed(hyp.tracks[static_cast<size_t>(t)], sensor).second;
    }

    // Grouping: gating edges plus measurement pairs within the largest
    // partitioning distance, so multi-measurement new-target cells stay
    // within one group.
    UnionFind uf(n_tracks + n_meas);
    for (int t = 0; t < n_tracks; ++t) {
        for (int m : gates.track_gates[static_cast<size_t>(t)]) uf.unite(t, n_tracks + m);
    }
    const double max_link = config.partition_thresholds.empty()
                                ? 0.0
                                : *std::max_element(config.partition_thresholds.begin(),
                                                    config.partition_thresholds.end());
    for (int a = 0; a < n_meas; ++a) {
        for (int b = a + 1; b < n_meas; ++b) {
            if ((scan[static_cast<size_t>(a)] - scan[static_cast<size_t>(b)]).norm() < max_link) {
                uf.unite(n_tracks + a, n_tracks + b);
            }
        }
    }
    std::map<int, Group> grouped;
    for (int t = 0; t < n_tracks; ++t) grouped[uf.find(t)].tracks.push_back(t);
    for (int m = 0; m < n_meas; ++m) grouped[uf.find(n_tracks + m)].measurements.push_back(m);

    // Per-group candidate solutions.
    std::vector<std::vector<GroupSolution>> group_solutions;
    for (auto& [root, grp] : grouped) {
        std::vector<GroupSolution> candidates;
        if (grp.measurements.empty()) {
            candidates.push_back({{}, 0.0});  // all tracks missed; covered by baseline
            group_solutions.push_back(std::move(candidates));
            continue;
        }

        std::vector<Vec2> points;
        for (int m : grp.measurements) points.push_back(scan[static_cast<size_t>(m)]);
        const auto partitions = partition_measurements(points, config.partition_thresholds);

        // Cache cell likelihoods across partitions.
        std::map<std::pair<int, CellKey>, double> detect_cache;
        auto cell_meas = [&](const CellKey& key) {
            MeasurementSet out;
            for (int m : key) out.push_back(scan[static_cast<size_t>(m)]);
            return out;
        };
        auto log_new = [&](const CellKey& key) {
            auto it = new_source_cache.find(key);
            if (it == new_source_cache.end()) {
                it = new_source_cache
                         .emplace(key, ppp_detect_new(ppp, cell_meas(key), sensor).second)
                         .first;
            }
            return it->second;
        };
        auto log_detect = [&](int track, const CellKey& key) {
            auto it = detect_cache.find({track, key});
            if (it == detect_cache.end()) {
                const double ll =
                    bernoulli_detect(hyp.tracks[static_cast<size_t>(track)], cell_meas(key), sensor)
                        .second;
                it = detect_cache.emplace(std::make_pair(track, key), ll).first;
            }
            return it->second;
        };
        auto cell_gated = [&](int track, const CellKey& key) {
            const auto& gated = gates.track_gates[static_cast<size_t>(track)];
            for (int m : key) {
                if (!std::binary_search(gated.begin(), gated.end(), m)) return false;
            }
            return true;
        };

        std::map<std::vector<std::pair<int, CellKey>>, GroupSolution> dedup;
        const int n_grp_tracks = static_cast<int>(grp.tracks.size());
        for (const auto& partition : partitions) {
            std::vector<CellKey> cells;
            for (const auto& local_cell : partition) {
                CellKey key;
                for (int li : local_cell) key.push_back(grp.measurements[static_cast<size_t>(li)]);
                std::sort(key.begin(), key.end());
                cells.push_back(std::move(key));
            }
            const int n_cells = static_cast<int>(cells.size());
            const int n_cols = n_grp_tracks + n_cells;
            std::vector<std::vector<double>> costs(
                static_cast<size_t>(n_cells), std::vector<double>(static_cast<size_t>(n_cols), kInf));
            for (int row = 0; row < n_cells; ++row) {
                for (int tc = 0; tc < n_grp_tracks; ++tc) {
                    const int t = grp.tracks[static_cast<size_t>(tc)];
                    if (!cell_gated(t, cells[static_cast<size_t>(row)])) continue;
                    const double ld = log_detect(t, cells[static_cast<size_t>(row)]);
                    if (std::isfinite(ld)) {
                        costs[static_cast<size_t>(row)][static_cast<size_t>(tc)] =
                            -(ld - log_miss[static_cast<size_t>(t)]);
                    }
                }
                const double ln = log_new(cells[static_cast<size_t>(row)]);
                if (std::isfinite(ln)) {
                    costs[static_cast<size_t>(row)][static_cast<size_t>(n_grp_tracks + row)] = -ln;
                }
            }

            std::vector<RankedAssignment> ranked;
            try {
                ranked = murty_kbest(costs, config.murty_k);
            } catch (const Infeasible&) {
                continue;
            }
            for (const auto& sol : ranked) {
                GroupSolution gs;
                gs.log_score = -sol.total_cost;  // relative to the all-missed baseline
                for (int row = 0; row < n_cells; ++row) {
                    const int col = sol.assignment[static_cast<size_t>(row)];
                    const int track = col < n_grp_tracks ? grp.tracks[static_cast<size_t>(col)] : -1;
                    gs.cells.emplace_back(track, cells[static_cast<size_t>(row)]);
                }
                const auto key = gs.canonical();
                auto [it, inserted] = dedup.emplace(key, gs);
                (void)it;
                (void)inserted;
            }
        }
        for (auto& [key, gs] : dedup) candidates.push_back(std::move(gs));
        std::sort(candidates.begin(), candidates.end(),
                  [](const GroupSolution& a, const GroupSolution& b) {
                      return a.log_score > b.log_score;
                  });
        if (candidates.empty()) candidates.push_back({{}, -kInf});
        group_solutions.push_back(std::move(candidates));
    }

    double baseline = 0.0;
    for (int t = 0; t < n_tracks; ++t) baseline += log_miss[static_cast<size_t>(t)];

    // Beam-compose group solutions into global associations. Partials hold
    // one candidate index per group; cells are materialized only for the
    // survivors.
    struct Partial {
        std::vector<int> choice;  // [group] -> candidate index
        double log_score;
    };
    std::vector<Partial> beam = {{{}, baseline}};
    for (const auto& candidates : group_solutions) {
        std::vector<Partial> next;
        next.reserve(beam.size() * candidates.size());
        for (const auto& partial : beam) {
            for (size_t ci = 0; ci < candidates.size(); ++ci) {
                Partial ext;
                ext.choice = partial.choice;
                ext.choice.push_back(static_cast<int>(ci));
                ext.log_score = partial.log_score + candidates[ci].log_score;
                next.push_back(std::move(ext));
            }
        }
        std::sort(next.begin(), next.end(), [](const Partial& a, const Partial& b) {
            if (a.log_score != b.log_score) return a.log_score > b.log_score;
            return a.choice < b.choice;
        });
        if (static_cast<int>(next.size()) > config.max_assoc) {
            next.resize(static_cast<size_t>(config.max_assoc));
        }
        beam = std::move(next);
    }

    std::vector<ScoredAssociation> out;
    for (const auto& partial : beam) {
        ScoredAssociation sa;
        sa.log_score = partial.log_score;
        for (size_t g = 0; g < partial.choice.size(); ++g) {
            const auto& gs = group_solutions[g][static_cast<size_t>(partial.choice[g])];
            for (const auto& [track, key] : gs.cells) {
                AssociationCell cell;
                if (track >= 0) cell.track = track;
                cell.measurements = key;
                sa.association.cells.push_back(std::move(cell));
            }
        }
        out.push_back(std::move(sa));
    }
    return out;
}

}  // namespace

std::vector<ScoredAssociation> build_associations(const GlobalHypothesis& hyp,
                                                  const PPPIntensity& ppp,
                                                  const MeasurementSet& scan,
                                                  const SensorModel& sensor,
                                                  const AssociationConfig& config) {
    std::map<CellKey, double> cache;
    return build_associations_impl(hyp, ppp, scan, sensor, config, cache);
}

AssociationProvider reduced_provider(const AssociationConfig& config) {
    auto cache = std::make_shared<NewSourceCache>();
    return [config, cache](const GlobalHypothesis& hyp, const PPPIntensity& ppp,
                           const MeasurementSet& scan, const SensorModel& sensor) {
        cache->sync(ppp, scan);
        const auto scored =
            build_associations_impl(hyp, ppp, scan, sensor, config, cache->values);
        std::vector<Association> out;
        out.reserve(scored.size());
        for (const auto& sa : scored) out.push_back(sa.association);
        return out;
    };
}

}  // namespace pmbm
