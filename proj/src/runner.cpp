#include "pmbm/runner.hpp"

#include "json.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>

namespace pmbm {

const char* const kCsvHeader =
    "scan,gospa_total,gospa_loc,gospa_missed,gospa_false,n_hyp,n_tracks,ppp_mass,ms_elapsed";

double ppp_mass_in_region(const PMBMDensity& density, double xlo, double xhi, double ylo,
                          double yhi) {
    double total = 0.0;
    for (const auto& comp : density.ppp.components) {
        const Vec2 mean = comp.params.position();
        const Mat2 cov = comp.params.P.topLeftCorner<2, 2>();
        total += std::exp(comp.log_w) *
                 math::gaussian_rect_prob(mean, cov, xlo, xhi, ylo, yhi);
    }
    return total;
}

namespace {

std::vector<Footprint> estimate_footprints(const std::vector<Estimate>& estimates) {
    std::vector<Footprint> out;
    for (const auto& e : estimates) {
        Footprint f;
        f.position = e.kin.head<2>();
        f.extent = e.extent;
        out.push_back(f);
    }
    return out;
}

void write_csv(const std::string& path, const std::vector<ScanRecord>& records) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << kCsvHeader << "\n";
    char line[256];
    for (const auto& r : records) {
        std::snprintf(line, sizeof(line), "%d,%.6f,%.6f,%.6f,%.6f,%d,%d,%.6f,%.3f", r.scan,
                      r.gospa.total, r.gospa.localisation, r.gospa.missed, r.gospa.false_,
                      r.n_hyp, r.n_tracks, r.ppp_mass, r.ms_elapsed);
        out << line << "\n";
    }
}

void write_summary(const std::string& path, const Scenario& scenario,
                   const RunConfig& config, const RunReport& report) {
    nlohmann::json j;
    j["mc_runs"] = config.mc_runs;
    j["seed"] = config.seed;
    j["duration"] = scenario.duration;
    j["exhaustive"] = config.exhaustive;
    j["run_wall_ms"] = report.run_wall_ms;

    std::vector<double> avg_total(static_cast<size_t>(scenario.duration), 0.0);
    std::vector<double> avg_hyp(static_cast<size_t>(scenario.duration), 0.0);
    std::vector<double> avg_ppp(static_cast<size_t>(scenario.duration), 0.0);
    for (const auto& run : report.runs) {
        for (const auto& r : run) {
            avg_total[static_cast<size_t>(r.scan)] += r.gospa.total;
            avg_hyp[static_cast<size_t>(r.scan)] += static_cast<double>(r.n_hyp);
            avg_ppp[static_cast<size_t>(r.scan)] += r.ppp_mass;
        }
    }
    for (auto& v : avg_total) v /= config.mc_runs;
    for (auto& v : avg_hyp) v /= config.mc_runs;
    for (auto& v : avg_ppp) v /= config.mc_runs;
    j["avg_gospa_total"] = avg_total;
    j["avg_n_hyp"] = avg_hyp;
    j["avg_ppp_mass"] = avg_ppp;

    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << j.dump(2) << "\n";
}

}  // namespace

RunReport run(const Scenario& scenario, const RunConfig& config, ScanCallback* callback) {
    if (config.mc_runs < 1) throw std::invalid_argument("mc_runs must be >= 1");
    RunReport report;
    const AssociationProvider provider =
        config.exhaustive ? exhaustive_provider() : reduced_provider(config.association);

    if (!config.out_dir.empty()) {
        std::filesystem::create_directories(config.out_dir);
    }

    for (int run_idx = 0; run_idx < config.mc_runs; ++run_idx) {
        std::mt19937_64 rng(config.seed + static_cast<uint64_t>(run_idx));
        PMBMDensity density;
        std::vector<ScanRecord> records;
        const auto run_start = std::chrono::steady_clock::now();

        for (int k = 0; k < scenario.duration; ++k) {
            const auto scan_start = std::chrono::steady_clock::now();
            density = predict(density, scenario.motion, scenario.sensor, scenario.birth);

            SensorModel sensor_k = scenario.sensor;
            sensor_k.p_detect = detection_field_at(scenario, k);
            const MeasurementSet scan = generate_measurements(scenario, k, rng);

            density = update(density, scan, sensor_k, provider);
            if (!config.exhaustive) reduce(density, config.reduction);

            const auto estimates = extract_estimate(density);
            const auto truth = truth_footprints(scenario, k);
            const auto scan_end = std::chrono::steady_clock::now();

            ScanRecord record;
            record.scan = k;
            record.gospa = gospa(truth, estimate_footprints(estimates), 10.0, 1.0);
            record.n_hyp = static_cast<int>(density.hypotheses.size());
            record.n_tracks = static_cast<int>(estimates.size());
            record.ppp_mass = density.ppp.total_mass();
            record.ms_elapsed =
                config.deterministic_timing
                    ? 0.0
                    : std::chrono::duration<double, std::milli>(scan_end - scan_start).count();
            records.push_back(record);
            if (callback) callback->on_scan(k, density);
        }

        const auto run_end = std::chrono::steady_clock::now();
        report.run_wall_ms.push_back(
            std::chrono::duration<double, std::milli>(run_end - run_start).count());
        if (!config.out_dir.empty()) {
            write_csv(config.out_dir + "/run_" + std::to_string(run_idx) + ".csv", records);
        }
        report.runs.push_back(std::move(records));
    }

    if (!config.out_dir.empty()) {
        write_summary(config.out_dir + "/summary.json", scenario, config, report);
    }
    return report;
}

}  // namespace pmbm
