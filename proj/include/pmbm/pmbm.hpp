#pragma once

#include "pmbm/ggiw.hpp"

#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

namespace pmbm {

class EmptyCell : public std::runtime_error {
public:
    EmptyCell() : std::runtime_error("association cell has no measurements") {}
};

class NoAssociations : public std::runtime_error {
public:
    NoAssociations() : std::runtime_error("association provider returned an empty set") {}
};

class TooLarge : public std::runtime_error {
public:
    TooLarge() : std::runtime_error("association space too large to enumerate") {}
};

/// One potentially detected target: existence probability plus a GGIW mixture
/// state (length one except transiently after a missed-detection update).
struct BernoulliTrack {
    double r = 0.0;
    std::vector<WeightedGGIW> state;
    int id = -1;

    const GGIWParams& mode() const { return state.front().params; }
    Vec2 position() const { return mode().position(); }
};

/// Undetected-target intensity; component log-weights are Poisson masses,
/// not normalized.
struct PPPIntensity {
    std::vector<WeightedGGIW> components;

    double total_mass() const;
};

/// One multi-Bernoulli: a data-association history.
struct GlobalHypothesis {
    double log_w = 0.0;
    std::vector<BernoulliTrack> tracks;
};

struct PMBMDensity {
    PPPIntensity ppp;
    std::vector<GlobalHypothesis> hypotheses{GlobalHypothesis{}};
    int next_track_id = 0;

    const GlobalHypothesis& best_hypothesis() const;
    /// log-sum-exp of hypothesis weights (0 when normalized).
    double log_total_weight() const;
    void normalize();
};

/// A partition of measurement indices and track indices into cells; each cell
/// holds at most one track index, and a cell without one has >= 1 measurement.
struct AssociationCell {
    std::optional<int> track = std::nullopt;  // index into the hypothesis track list
    std::vector<int> measurements;            // indices into the scan's measurement set
};

struct Association {
    std::vector<AssociationCell> cells;
};

using AssociationProvider = std::function<std::vector<Association>(
    const GlobalHypothesis&, const PPPIntensity&, const MeasurementSet&,
    const SensorModel&)>;

// ---- Recursion ----

PMBMDensity predict(const PMBMDensity& density, const MotionModel& motion,
                    const SensorModel& sensor, const PPPIntensity& birth);

PPPIntensity ppp_update_missed(const PPPIntensity& ppp, const SensorModel& sensor);

/// First-detection Bernoulli from the PPP for a nonempty measurement cell.
/// Returns the new track (id unassigned) and log L of the cell.
std::pair<BernoulliTrack, double> ppp_detect_new(const PPPIntensity& ppp,
                                                 const MeasurementSet& cell,
                                                 const SensorModel& sensor);

std::pair<BernoulliTrack, double> bernoulli_detect(const BernoulliTrack& track,
                                                   const MeasurementSet& cell,
                                                   const SensorModel& sensor);

std::pair<BernoulliTrack, double> bernoulli_missed(const BernoulliTrack& track,
                                                   const SensorModel& sensor);

PMBMDensity update(const PMBMDensity& density, const MeasurementSet& scan,
                   const SensorModel& sensor, const AssociationProvider& provider);

/// Every partition of measurements {0..n_meas-1} and the given track indices
/// with at most one track per cell. Guarded at n_meas + tracks <= 12.
std::vector<Association> enumerate_all_associations(int n_meas,
                                                    const std::vector<int>& track_indices);

/// Provider backed by enumerate_all_associations (the test oracle).
AssociationProvider exhaustive_provider();

struct Estimate {
    Vec4 kin;
    Mat2 extent;
    double rate = 0.0;
    int id = -1;
    double r = 0.0;
};

/// Means of all Bernoullis with r > 0.5 in the highest-weight hypothesis.
std::vector<Estimate> extract_estimate(const PMBMDensity& density);

}  // namespace pmbm
