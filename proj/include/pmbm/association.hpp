#pragma once

#include "pmbm/metrics.hpp"
#include "pmbm/pmbm.hpp"

#include <vector>

namespace pmbm {

/// Admissible measurement indices per hypothesis track and per PPP component.
struct GateResult {
    std::vector<std::vector<int>> track_gates;  // [track index] -> measurement indices
    std::vector<std::vector<int>> ppp_gates;    // [ppp component] -> measurement indices
};

/// One approximately independent sub-problem: connected tracks and
/// measurements of the gating graph.
struct Group {
    std::vector<int> tracks;
    std::vector<int> measurements;
};

struct AssociationConfig {
    double gate_prob = 0.999;
    std::vector<double> partition_thresholds = {2.0, 3.0, 4.0, 6.0};  // meters
    int murty_k = 20;
    int max_assoc = 20;  // global associations kept per hypothesis
};

/// Chi-square gate on the single-measurement innovation covariance
/// S = H P H^T + mean extent.
GateResult gate(const std::vector<BernoulliTrack>& tracks, const PPPIntensity& ppp,
                const MeasurementSet& scan, const SensorModel& sensor, double gate_prob);

/// Connected components of the bipartite track-measurement gating graph.
/// Ungated measurements become singleton measurement-only groups.
std::vector<Group> group(const GateResult& gates, int n_tracks, int n_meas);

/// Distance partitions: connected components of the graph linking points
/// closer than each threshold; deduplicated; the all-singletons partition is
/// always present.
std::vector<std::vector<std::vector<int>>> partition_measurements(
    const std::vector<Vec2>& points, const std::vector<double>& thresholds);

struct RankedAssignment {
    std::vector<int> assignment;  // assignment[row] = column
    double total_cost = 0.0;
};

/// The k cheapest assignments in nondecreasing cost order, equal costs broken
/// by lexicographic assignment order. Rows must not outnumber columns.
std::vector<RankedAssignment> murty_kbest(const std::vector<std::vector<double>>& costs,
                                          int k);

/// Gating + grouping + partitioning + ranked assignment, composed into global
/// associations with per-association log-likelihood scores.
struct ScoredAssociation {
    Association association;
    double log_score = 0.0;
};
std::vector<ScoredAssociation> build_associations(const GlobalHypothesis& hyp,
                                                  const PPPIntensity& ppp,
                                                  const MeasurementSet& scan,
                                                  const SensorModel& sensor,
                                                  const AssociationConfig& config);

/// Provider backed by build_associations.
AssociationProvider reduced_provider(const AssociationConfig& config);

}  // namespace pmbm
