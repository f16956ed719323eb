#include "doctest.h"
#include "pmbm/runner.hpp"
#include "test_util.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace pmbm;

namespace {

Scenario tiny_scenario(double pd = 0.9, double clutter = 3.0) {
    Scenario s;
    s.duration = 10;
    s.seed = 7;
    s.sensor.p_detect = DetectionField(pd);
    s.sensor.clutter_rate = clutter;
    s.sensor.area = 4.0e4;

    GGIWParams birth;
    birth.alpha = 10.0;
    birth.beta = 1.0;
    birth.m << 0.0, 0.0, 0.0, 0.0;
    birth.P = Mat4::Identity();
    birth.P(0, 0) = birth.P(1, 1) = 400.0;
    birth.P(2, 2) = birth.P(3, 3) = 9.0;
    birth.v = 14.0;
    birth.V = 4.0 * (birth.v - 6.0) * Mat2::Identity();
    s.birth.components.push_back({std::log(0.1), birth});

    GroundTruthTrack t;
    t.birth_time = 0;
    t.death_time = 10;
    t.waypoints = {Vec2(-5.0, 0.0), Vec2(5.0, 0.0)};
    t.extent << 4.0, 0.0, 0.0, 2.0;
    t.rate = 10.0;
    s.tracks.push_back(t);
    return s;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("ppp_mass_in_region point values") {
    PMBMDensity density;
    CHECK(ppp_mass_in_region(density, -10, 10, -10, 10) == 0.0);

    GGIWParams z;
    z.m << 1.0, 2.0, 0.0, 0.0;
    z.P = Mat4::Identity();
    density.ppp.components.push_back({std::log(0.7), z});
    CHECK(ppp_mass_in_region(density, -1e6, 1e6, -1e6, 1e6) == doctest::Approx(0.7).epsilon(1e-9));
    // Half-plane through the mean.
    CHECK(ppp_mass_in_region(density, -1e6, 1.0, -1e6, 1e6) ==
          doctest::Approx(0.35).epsilon(1e-6));
}

TEST_CASE("a blind sensor yields empty estimates and pure missed GOSPA") {
    const Scenario s = tiny_scenario(0.0, 0.0);
    RunConfig config;
    config.seed = 3;
    const auto report = run(s, config);
    REQUIRE(report.runs.size() == 1);
    REQUIRE(report.runs[0].size() == 10);
    for (const auto& r : report.runs[0]) {
        CHECK(r.n_tracks == 0);
        CHECK(r.gospa.missed == doctest::Approx(5.0));  // one true target, c/2
        CHECK(r.gospa.total == doctest::Approx(5.0));
        CHECK(r.gospa.localisation == 0.0);
        CHECK(r.gospa.false_ == 0.0);
    }
}

TEST_CASE("GOSPA rows decompose and hypothesis counts respect the cap") {
    const Scenario s = tiny_scenario();
    RunConfig config;
    config.seed = 11;
    config.mc_runs = 2;
    config.reduction.cap = 6;
    const auto report = run(s, config);
    REQUIRE(report.runs.size() == 2);
    for (const auto& records : report.runs) {
        for (const auto& r : records) {
            CHECK(r.gospa.total ==
                  doctest::Approx(r.gospa.localisation + r.gospa.missed + r.gospa.false_)
                      .epsilon(1e-10));
            CHECK(r.n_hyp >= 1);
            CHECK(r.n_hyp <= 6);
            CHECK(r.ppp_mass >= 0.0);
        }
    }
}

TEST_CASE("the filter locks onto the target in a clean scenario") {
    const Scenario s = tiny_scenario(0.98, 1.0);
    RunConfig config;
    config.seed = 5;
    const auto report = run(s, config);
    // After a few scans the single target should be tracked.
    int tracked = 0;
    for (size_t k = 3; k < report.runs[0].size(); ++k) {
        if (report.runs[0][k].n_tracks == 1) ++tracked;
    }
    CHECK(tracked >= 5);
}

TEST_CASE("file output is deterministic and carries the fixed header") {
    const Scenario s = tiny_scenario();
    const auto dir_a = std::filesystem::temp_directory_path() / "pmbm_run_a";
    const auto dir_b = std::filesystem::temp_directory_path() / "pmbm_run_b";
    RunConfig config;
    config.seed = 21;
    config.out_dir = dir_a.string();
    run(s, config);
    config.out_dir = dir_b.string();
    run(s, config);

    const std::string csv_a = slurp((dir_a / "run_0.csv").string());
    const std::string csv_b = slurp((dir_b / "run_0.csv").string());
    CHECK(!csv_a.empty());
    CHECK(csv_a == csv_b);
    CHECK(csv_a.rfind("scan,gospa_total,gospa_loc,gospa_missed,gospa_false,n_hyp,n_tracks,"
                      "ppp_mass,ms_elapsed\n",
                      0) == 0);
    // one row per scan plus header
    CHECK(std::count(csv_a.begin(), csv_a.end(), '\n') == 11);
    CHECK(std::filesystem::exists(dir_a / "summary.json"));
    std::filesystem::remove_all(dir_a);
    std::filesystem::remove_all(dir_b);
}
