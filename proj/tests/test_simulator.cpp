#include "doctest.h"
#include "pmbm/simulator.hpp"
#include "test_util.hpp"

#include <cmath>
#include <random>

using namespace pmbm;

namespace {

Scenario single_target_scenario(double pd, double clutter, double gamma = 10.0) {
    Scenario s;
    s.duration = 100000;
    s.sensor.p_detect = DetectionField(pd);
    s.sensor.clutter_rate = clutter;
    GroundTruthTrack t;
    t.birth_time = 0;
    t.death_time = s.duration;
    t.waypoints = {Vec2(0.0, 0.0)};
    t.extent << 4.0, 1.0, 1.0, 2.0;
    t.rate = gamma;
    s.tracks.push_back(t);
    return s;
}

}  // namespace

TEST_CASE("builtin scenarios carry the published parameters") {
    SUBCASE("scenario 1") {
        const Scenario s = builtin_scenario("1");
        CHECK(s.duration == 100);
        CHECK(s.tracks.size() == 2);
        CHECK(s.sensor.clutter_rate == doctest::Approx(30.0));
        CHECK(s.sensor.p_detect.at(Vec2::Zero()) == doctest::Approx(0.98));
        CHECK(s.sensor.p_survive == doctest::Approx(0.99));
    }
    SUBCASE("scenario 2") {
        const Scenario s = builtin_scenario("2");
        CHECK(s.duration == 200);
        CHECK(s.tracks.size() == 4);
        CHECK(s.sensor.p_detect.at(Vec2::Zero()) == doctest::Approx(0.80));
        // staggered births from a common location
        const Vec2 origin = s.tracks[0].waypoints.front();
        for (const auto& t : s.tracks) {
            CHECK((t.waypoints.front() - origin).norm() < 1e-9);
        }
        CHECK(s.tracks[0].birth_time < s.tracks[3].birth_time);
    }
    SUBCASE("scenario 3") {
        const Scenario s = builtin_scenario("3");
        CHECK(s.tracks.size() == 27);
        CHECK(s.sensor.clutter_rate == doctest::Approx(60.0));
        CHECK(s.sensor.p_detect.at(Vec2::Zero()) == doctest::Approx(0.90));
        for (const auto& t : s.tracks) {
            CHECK(std::abs(t.waypoints.front().x()) == doctest::Approx(75.0));
            CHECK(std::abs(t.waypoints.front().y()) == doctest::Approx(75.0));
        }
    }
    SUBCASE("occlusion") {
        const Scenario s = builtin_scenario("occlusion");
        REQUIRE(s.occlusion.has_value());
        CHECK(s.occlusion->floor == doctest::Approx(0.01));
        CHECK(s.tracks.size() == 2);
    }
    SUBCASE("unknown id") {
        CHECK_THROWS_AS(builtin_scenario("7"), ScenarioError);
    }
}

TEST_CASE("waypoint interpolation hits the endpoints with constant velocity") {
    GroundTruthTrack t;
    t.birth_time = 10;
    t.death_time = 30;
    t.waypoints = {Vec2(0, 0), Vec2(19, 38)};
    const Vec4 first = t.state_at(10, 1.0);
    const Vec4 last = t.state_at(29, 1.0);
    CHECK(first.head<2>().isApprox(Vec2(0, 0), 1e-12));
    CHECK(last.head<2>().isApprox(Vec2(19, 38), 1e-9));
    CHECK(first(2) == doctest::Approx(1.0));
    CHECK(first(3) == doctest::Approx(2.0));
    CHECK_THROWS_AS(t.state_at(30, 1.0), ScenarioError);
}

TEST_CASE("no detection and no clutter yields empty scans") {
    Scenario s = single_target_scenario(0.0, 0.0);
    std::mt19937_64 rng(301);
    for (int k = 0; k < 200; ++k) CHECK(generate_measurements(s, k, rng).empty());
}

TEST_CASE("fixed seed reproduces the measurement stream exactly") {
    const Scenario s = builtin_scenario("1");
    std::mt19937_64 a(42), b(42);
    for (int k = 0; k < 20; ++k) {
        const auto za = generate_measurements(s, k, a);
        const auto zb = generate_measurements(s, k, b);
        REQUIRE(za.size() == zb.size());
        for (size_t i = 0; i < za.size(); ++i) CHECK(za[i] == zb[i]);
    }
}

TEST_CASE("clutter count averages the configured rate") {
    Scenario s = single_target_scenario(0.0, 30.0);
    std::mt19937_64 rng(302);
    const int n_scans = 10000;
    double total = 0.0;
    for (int k = 0; k < n_scans; ++k) {
        total += static_cast<double>(generate_measurements(s, k, rng).size());
    }
    const double mean = total / n_scans;
    const double sigma = std::sqrt(30.0 / n_scans);
    CHECK(std::abs(mean - 30.0) <= 3.0 * sigma);
}

TEST_CASE("detection frequency matches pD(1 - exp(-gamma))") {
    const double pd = 0.7, gamma = 2.0;
    Scenario s = single_target_scenario(pd, 0.0, gamma);
    std::mt19937_64 rng(303);
    const int n_scans = 10000;
    int detected = 0;
    for (int k = 0; k < n_scans; ++k) {
        if (!generate_measurements(s, k, rng).empty()) ++detected;
    }
    const double expect = pd * (1.0 - std::exp(-gamma));
    const double sigma = std::sqrt(expect * (1.0 - expect) / n_scans);
    CHECK(std::abs(static_cast<double>(detected) / n_scans - expect) <= 3.0 * sigma);
}

TEST_CASE("measurement scatter converges to the true extent") {
    Scenario s = single_target_scenario(1.0, 0.0, 10.0);
    std::mt19937_64 rng(304);
    Mat2 scatter = Mat2::Zero();
    int n = 0;
    for (int k = 0; k < 10000; ++k) {
        for (const auto& z : generate_measurements(s, k, rng)) {
            scatter += z * z.transpose();  // true position is the origin
            ++n;
        }
    }
    scatter /= n;
    // Wishart relative sampling error ~ sqrt(2/n) per entry.
    const double tol = 3.0 * std::sqrt(2.0 / n) * 4.0;
    CHECK((scatter - s.tracks[0].extent).cwiseAbs().maxCoeff() <= tol);
}

TEST_CASE("occlusion shadows cells behind a target only") {
    DetectionField field(-50.0, 50.0, -50.0, 50.0, 50, 50, 0.9);
    SUBCASE("no targets leaves the field unchanged") {
        const auto out = cast_occlusion(field, {}, Vec2::Zero(), 0.01);
        CHECK(out.at(Vec2(0.0, 30.0)) == doctest::Approx(0.9));
    }
    SUBCASE("wedge behind the ellipse") {
        Footprint target;
        target.position = Vec2(0.0, 10.0);
        target.extent = 4.0 * Mat2::Identity();  // 2 m radius disc
        const auto out = cast_occlusion(field, {target}, Vec2::Zero(), 0.01);
        CHECK(out.at(Vec2(0.0, 40.0)) == doctest::Approx(0.01));   // straight behind
        CHECK(out.at(Vec2(0.0, 5.0)) == doctest::Approx(0.9));     // in front
        CHECK(out.at(Vec2(40.0, 0.0)) == doctest::Approx(0.9));    // off to the side
        CHECK(out.at(Vec2(0.0, -40.0)) == doctest::Approx(0.9));   // opposite side
    }
}

TEST_CASE("occlusion scenario accumulates shadow over the configured grid") {
    const Scenario s = builtin_scenario("occlusion");
    const DetectionField field = detection_field_at(s, 5);
    REQUIRE(field.is_grid());
    // Straight behind the stationary occluder at (0, 30).
    CHECK(field.at(Vec2(0.0, 60.0)) == doctest::Approx(0.01));
    // Far to the side, undisturbed.
    CHECK(field.at(Vec2(-70.0, -70.0)) == doctest::Approx(0.90));
}

TEST_CASE("scenario loading rejects bad input") {
    CHECK_THROWS_AS(load_scenario("/nonexistent/path.json"), ScenarioError);
}
