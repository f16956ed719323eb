#include "pmbm/simulator.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>

namespace pmbm {

namespace {

using nlohmann::json;

Vec2 parse_vec2(const json& j, const char* what) {
    if (!j.is_array() || j.size() != 2) {
        throw ScenarioError(std::string(what) + " must be a [x, y] pair");
    }
    return Vec2(j[0].get<double>(), j[1].get<double>());
}

GGIWParams default_birth_params(const Vec2& mean, double pos_std, double vel_std) {
    GGIWParams z;
    // Mean rate 10 with a moderately informative prior: a vague gamma lets a
    // clutter-born track slide to a near-zero rate posterior, where missed
    // detections carry no evidence of absence and the track never dies.
    z.alpha = 20.0;
    z.beta = 2.0;
    z.m << mean.x(), mean.y(), 0.0, 0.0;
    z.P = Mat4::Identity();
    z.P(0, 0) = z.P(1, 1) = pos_std * pos_std;
    z.P(2, 2) = z.P(3, 3) = vel_std * vel_std;
    z.v = 14.0;
    z.V = 4.0 * (z.v - 2.0 * kExtentDim - 2.0) * Mat2::Identity();
    return z;
}

Mat2 extent_from_axes(double a, double b, double angle) {
    Mat2 rot;
    rot << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
    Mat2 diag = Mat2::Zero();
    diag(0, 0) = a * a;
    diag(1, 1) = b * b;
    return rot * diag * rot.transpose();
}

/// Does the segment origin -> point cross the ellipse (center, X)?
/// The ellipse boundary is u^T X^-1 u = 1 around the center.
bool segment_hits_ellipse(const Vec2& origin, const Vec2& point, const Vec2& center,
                          const Mat2& extent_inv) {
    const Vec2 d = point - origin;
    const Vec2 f = origin - center;
    const double a = d.dot(extent_inv * d);
    const double b = 2.0 * f.dot(extent_inv * d);
    const double c = f.dot(extent_inv * f) - 1.0;
    const double disc = b * b - 4.0 * a * c;
    if (disc < 0.0 || a <= 0.0) return false;
    const double sq = std::sqrt(disc);
    const double t1 = (-b - sq) / (2.0 * a);
    const double t2 = (-b + sq) / (2.0 * a);
    return (t1 >= 0.0 && t1 <= 1.0) || (t2 >= 0.0 && t2 <= 1.0);
}

}  // namespace

Vec4 GroundTruthTrack::state_at(int scan, double Ts) const {
    if (!alive(scan)) throw ScenarioError("state requested outside the track's lifetime");
    Vec4 out = Vec4::Zero();
    if (waypoints.empty()) return out;
    if (waypoints.size() == 1 || death_time <= birth_time + 1) {
        out.head<2>() = waypoints.front();
        return out;
    }
    const int n_seg = static_cast<int>(waypoints.size()) - 1;
    const double lifetime = static_cast<double>(death_time - 1 - birth_time);
    const double seg_len = lifetime / n_seg;  // scans per segment
    const double t = static_cast<double>(scan - birth_time);
    int seg = std::min(static_cast<int>(t / seg_len), n_seg - 1);
    const double frac = (t - seg * seg_len) / seg_len;
    const Vec2& p0 = waypoints[static_cast<size_t>(seg)];
    const Vec2& p1 = waypoints[static_cast<size_t>(seg) + 1];
    out.head<2>() = p0 + frac * (p1 - p0);
    out.tail<2>() = (p1 - p0) / (seg_len * Ts);
    return out;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ScenarioError("cannot open scenario file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ScenarioError("malformed scenario JSON: " + std::string(e.what()));
    }
    try {
        Scenario s;
        s.duration = j.at("duration").get<int>();
        if (s.duration <= 0) throw ScenarioError("duration must be positive");
        s.seed = j.value("seed", uint64_t{0});

        const json& sensor = j.at("sensor");
        s.sensor.clutter_rate = sensor.at("clutter_rate").get<double>();
        s.sensor.p_detect = DetectionField(sensor.at("p_detect").get<double>());
        s.sensor.p_survive = sensor.value("p_survive", 0.99);
        s.sensor.gate_prob = sensor.value("gate_prob", 0.999);
        if (sensor.contains("bounds")) {
            const Vec2 b = parse_vec2(sensor["bounds"], "sensor.bounds");
            s.bound_lo = b.x();
            s.bound_hi = b.y();
        }
        const double side = s.bound_hi - s.bound_lo;
        s.sensor.area = side * side;

        if (j.contains("motion")) {
            const json& motion = j["motion"];
            s.motion.Ts = motion.value("Ts", 1.0);
            s.motion.sigma_a = motion.value("sigma_a", 0.2);
            s.motion.tau = motion.value("tau", 5.0);
            s.motion.eta = motion.value("eta", 1.25);
        }

        for (const json& b : j.at("birth")) {
            const double weight = b.at("weight").get<double>();
            const Vec2 mean = parse_vec2(b.at("mean"), "birth.mean");
            const double pos_std = b.value("pos_std", 20.0);
            const double vel_std = b.value("vel_std", 3.0);
            s.birth.components.push_back(
                {std::log(weight), default_birth_params(mean, pos_std, vel_std)});
        }

        if (j.contains("occlusion")) {
            const json& occ = j["occlusion"];
            OcclusionModel model;
            model.origin = parse_vec2(occ.at("origin"), "occlusion.origin");
            model.floor = occ.value("floor", 0.01);
            if (occ.contains("grid")) {
                model.nx = occ["grid"][0].get<int>();
                model.ny = occ["grid"][1].get<int>();
            }
            s.occlusion = model;
        }

        for (const json& t : j.at("tracks")) {
            GroundTruthTrack track;
            track.birth_time = t.at("birth").get<int>();
            track.death_time = t.at("death").get<int>();
            if (track.death_time < track.birth_time) {
                throw ScenarioError("track death precedes birth");
            }
            for (const json& w : t.at("waypoints")) {
                track.waypoints.push_back(parse_vec2(w, "track waypoint"));
            }
            const json& axes = t.at("extent_axes");
            track.extent = extent_from_axes(axes[0].get<double>(), axes[1].get<double>(),
                                            t.value("angle", 0.0));
            track.rate = t.value("gamma", 10.0);
            s.tracks.push_back(std::move(track));
        }
        return s;
    } catch (const json::exception& e) {
        throw ScenarioError("invalid scenario content: " + std::string(e.what()));
    }
}

Scenario builtin_scenario(const std::string& id) {
    const char* env = std::getenv("PMBM_SCENARIO_DIR");
    const std::string dir = env ? env : PMBM_SCENARIO_DIR;
    if (id == "1" || id == "2" || id == "3") {
        return load_scenario(dir + "/scenario" + id + ".json");
    }
    if (id == "occlusion") {
        return load_scenario(dir + "/occlusion.json");
    }
    throw ScenarioError("unknown builtin scenario id: " + id);
}

std::vector<Footprint> truth_footprints(const Scenario& scenario, int scan) {
    std::vector<Footprint> out;
    for (const auto& t : scenario.tracks) {
        if (!t.alive(scan)) continue;
        Footprint f;
        f.position = t.state_at(scan, scenario.motion.Ts).head<2>();
        f.extent = t.extent;
        out.push_back(f);
    }
    return out;
}

DetectionField cast_occlusion(DetectionField field, const std::vector<Footprint>& targets,
                              const Vec2& origin, double floor) {
    if (!field.is_grid() || targets.empty()) return field;
    std::vector<Mat2> inverses;
    for (const auto& t : targets) inverses.push_back(t.extent.inverse());
    for (int iy = 0; iy < field.ny(); ++iy) {
        for (int ix = 0; ix < field.nx(); ++ix) {
            const Vec2 center = field.cell_center(ix, iy);
            for (size_t t = 0; t < targets.size(); ++t) {
                // Only cells strictly behind the ellipse are shadowed; the
                // occluding target itself stays visible.
                if (segment_hits_ellipse(origin, center, targets[t].position, inverses[t]) &&
                    (center - origin).norm() > (targets[t].position - origin).norm()) {
                    field.cell(ix, iy) = std::min(field.cell(ix, iy), floor);
                    break;
                }
            }
        }
    }
    return field;
}

DetectionField detection_field_at(const Scenario& scenario, int scan) {
    if (!scenario.occlusion) return scenario.sensor.p_detect;
    const auto& occ = *scenario.occlusion;
    DetectionField field(scenario.bound_lo, scenario.bound_hi, scenario.bound_lo,
                         scenario.bound_hi, occ.nx, occ.ny,
                         scenario.sensor.p_detect.at(Vec2::Zero()));
    return cast_occlusion(std::move(field), truth_footprints(scenario, scan), occ.origin,
                          occ.floor);
}

MeasurementSet generate_measurements(const Scenario& scenario, int scan,
                                     std::mt19937_64& rng) {
    if (scan < 0 || scan >= scenario.duration) {
        throw ScenarioError("scan index outside scenario duration");
    }
    const DetectionField field = detection_field_at(scenario, scan);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    std::normal_distribution<double> std_normal(0.0, 1.0);
    MeasurementSet out;

    for (const auto& t : scenario.tracks) {
        if (!t.alive(scan)) continue;
        const Vec4 xi = t.state_at(scan, scenario.motion.Ts);
        const Vec2 pos = xi.head<2>();
        if (u01(rng) >= field.at(pos)) continue;
        std::poisson_distribution<int> count(t.rate);
        const int n = count(rng);
        const Mat2 chol = math::chol_psd(t.extent);
        for (int i = 0; i < n; ++i) {
            const Vec2 noise(std_normal(rng), std_normal(rng));
            out.push_back(pos + chol * noise);
        }
    }

    std::poisson_distribution<int> clutter_count(scenario.sensor.clutter_rate);
    const int n_clutter = clutter_count(rng);
    std::uniform_real_distribution<double> upos(scenario.bound_lo, scenario.bound_hi);
    for (int i = 0; i < n_clutter; ++i) {
        const double x = upos(rng);
        const double y = upos(rng);
        out.push_back(Vec2(x, y));
    }

    std::shuffle(out.begin(), out.end(), rng);
    return out;
}

}  // namespace pmbm
