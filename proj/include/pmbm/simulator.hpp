#pragma once

#include "pmbm/metrics.hpp"
#include "pmbm/pmbm.hpp"

#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace pmbm {

class ScenarioError : public std::runtime_error {
public:
    explicit ScenarioError(const std::string& what) : std::runtime_error(what) {}
};

/// One scripted target: piecewise constant-velocity motion through waypoints,
/// fixed extent and measurement rate. Alive on scans birth_time <= k < death_time.
struct GroundTruthTrack {
    int birth_time = 0;
    int death_time = 0;
    std::vector<Vec2> waypoints;
    Mat2 extent = Mat2::Identity();
    double rate = 10.0;

    bool alive(int scan) const { return scan >= birth_time && scan < death_time; }
    /// Kinematic state [px py vx vy] at an alive scan.
    Vec4 state_at(int scan, double Ts) const;
};

struct OcclusionModel {
    Vec2 origin = Vec2::Zero();  // sensor position casting the shadows
    double floor = 0.01;
    int nx = 40;
    int ny = 40;
};

struct Scenario {
    int duration = 0;
    uint64_t seed = 0;
    double bound_lo = -100.0;
    double bound_hi = 100.0;
    SensorModel sensor;
    MotionModel motion;
    PPPIntensity birth;
    std::vector<GroundTruthTrack> tracks;
    std::optional<OcclusionModel> occlusion;
};

/// The bundled scenarios: "1", "2", "3" and "occlusion".
Scenario builtin_scenario(const std::string& id);

/// Load a scenario description from a JSON file. Throws ScenarioError on
/// missing fields or malformed content.
Scenario load_scenario(const std::string& path);

/// True (position, extent) pairs of every target alive at the scan.
std::vector<Footprint> truth_footprints(const Scenario& scenario, int scan);

/// Lower p_D to the floor in every grid cell whose line of sight from the
/// origin passes through a target's extent ellipse.
DetectionField cast_occlusion(DetectionField field, const std::vector<Footprint>& targets,
                              const Vec2& origin, double floor);

/// The detection field in effect at a scan: the sensor's own field, with
/// occlusion shadows cast by the alive targets when the scenario models them.
DetectionField detection_field_at(const Scenario& scenario, int scan);

/// One scan of synthetic data: per alive target, Bernoulli(p_D) detection and
/// a Poisson(rate) cluster from N(H xi, X); plus uniform Poisson clutter.
MeasurementSet generate_measurements(const Scenario& scenario, int scan,
                                     std::mt19937_64& rng);

}  // namespace pmbm
