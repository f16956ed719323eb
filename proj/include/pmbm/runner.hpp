#pragma once

#include "pmbm/association.hpp"
#include "pmbm/reduction.hpp"
#include "pmbm/simulator.hpp"

#include <string>
#include <vector>

namespace pmbm {

struct RunConfig {
    int mc_runs = 1;
    uint64_t seed = 0;
    std::string out_dir;        // empty: no files written
    bool exhaustive = false;    // enumeration-oracle provider, no reduction
    AssociationConfig association;
    ReductionConfig reduction;
    /// When set, the per-scan ms_elapsed CSV column is written as zero so the
    /// output is byte-identical across invocations; wall-clock timing is
    /// still reported in the JSON summary.
    bool deterministic_timing = true;
};

struct ScanRecord {
    int scan = 0;
    GospaResult gospa;
    int n_hyp = 0;
    int n_tracks = 0;
    double ppp_mass = 0.0;
    double ms_elapsed = 0.0;
};

struct RunReport {
    std::vector<std::vector<ScanRecord>> runs;  // [run][scan]
    std::vector<double> run_wall_ms;
};

/// Expected number of undetected targets inside an axis-aligned rectangle.
double ppp_mass_in_region(const PMBMDensity& density, double xlo, double xhi, double ylo,
                          double yhi);

/// One filtering pass over a scenario: predict, update, reduce, extract,
/// score. The caller owns the density (useful for inspecting it mid-run).
struct ScanCallback {
    virtual ~ScanCallback() = default;
    virtual void on_scan(int scan, const PMBMDensity& density) = 0;
};

/// Monte-Carlo orchestration: run r uses seed base+r. Writes run_<r>.csv and
/// summary.json under out_dir when it is set.
RunReport run(const Scenario& scenario, const RunConfig& config,
              ScanCallback* callback = nullptr);

/// The fixed CSV header line.
extern const char* const kCsvHeader;

}  // namespace pmbm
