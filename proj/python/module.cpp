#include "pmbm/runner.hpp"

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace pmbm;

PYBIND11_MODULE(_ggiwpmbm, m) {
    m.doc() = "GGIW-PMBM extended-object tracking filter";

    py::class_<GGIWParams>(m, "GGIWParams")
        .def(py::init<>())
        .def_readwrite("alpha", &GGIWParams::alpha)
        .def_readwrite("beta", &GGIWParams::beta)
        .def_readwrite("m", &GGIWParams::m)
        .def_readwrite("P", &GGIWParams::P)
        .def_readwrite("v", &GGIWParams::v)
        .def_readwrite("V", &GGIWParams::V)
        .def("mean_extent", &GGIWParams::mean_extent)
        .def("mean_rate", &GGIWParams::mean_rate)
        .def("position", &GGIWParams::position);

    py::class_<WeightedGGIW>(m, "WeightedGGIW")
        .def(py::init<>())
        .def_readwrite("log_w", &WeightedGGIW::log_w)
        .def_readwrite("params", &WeightedGGIW::params);

    py::class_<MotionModel>(m, "MotionModel")
        .def(py::init<>())
        .def_readwrite("Ts", &MotionModel::Ts)
        .def_readwrite("sigma_a", &MotionModel::sigma_a)
        .def_readwrite("tau", &MotionModel::tau)
        .def_readwrite("eta", &MotionModel::eta);

    py::class_<SensorModel>(m, "SensorModel")
        .def(py::init<>())
        .def_readwrite("clutter_rate", &SensorModel::clutter_rate)
        .def_readwrite("area", &SensorModel::area)
        .def_readwrite("p_survive", &SensorModel::p_survive)
        .def_readwrite("gate_prob", &SensorModel::gate_prob)
        .def("set_constant_pd",
             [](SensorModel& s, double pd) { s.p_detect = DetectionField(pd); })
        .def("pd_at", &SensorModel::pd_at);

    py::class_<BernoulliTrack>(m, "BernoulliTrack")
        .def(py::init<>())
        .def_readwrite("r", &BernoulliTrack::r)
        .def_readwrite("id", &BernoulliTrack::id)
        .def_readwrite("state", &BernoulliTrack::state)
        .def("mode", &BernoulliTrack::mode)
        .def("position", &BernoulliTrack::position);

    py::class_<PPPIntensity>(m, "PPPIntensity")
        .def(py::init<>())
        .def_readwrite("components", &PPPIntensity::components)
        .def("total_mass", &PPPIntensity::total_mass);

    py::class_<GlobalHypothesis>(m, "GlobalHypothesis")
        .def(py::init<>())
        .def_readwrite("log_w", &GlobalHypothesis::log_w)
        .def_readwrite("tracks", &GlobalHypothesis::tracks);

    py::class_<PMBMDensity>(m, "PMBMDensity")
        .def(py::init<>())
        .def_readwrite("ppp", &PMBMDensity::ppp)
        .def_readwrite("hypotheses", &PMBMDensity::hypotheses)
        .def_readwrite("next_track_id", &PMBMDensity::next_track_id)
        .def("log_total_weight", &PMBMDensity::log_total_weight)
        .def("normalize", &PMBMDensity::normalize);

    py::class_<Estimate>(m, "Estimate")
        .def_readonly("kin", &Estimate::kin)
        .def_readonly("extent", &Estimate::extent)
        .def_readonly("rate", &Estimate::rate)
        .def_readonly("id", &Estimate::id)
        .def_readonly("r", &Estimate::r);

    m.def("ggiw_predict", &ggiw_predict);
    m.def("ggiw_update", &ggiw_update);
    m.def("predict", &predict);
    m.def("update",
          [](const PMBMDensity& density, const MeasurementSet& scan,
             const SensorModel& sensor, bool exhaustive) {
              const auto provider =
                  exhaustive ? exhaustive_provider() : reduced_provider({});
              return update(density, scan, sensor, provider);
          },
          py::arg("density"), py::arg("scan"), py::arg("sensor"),
          py::arg("exhaustive") = false);
    m.def("extract_estimate", &extract_estimate);

    py::class_<ReductionConfig>(m, "ReductionConfig")
        .def(py::init<>())
        .def_readwrite("prune_w", &ReductionConfig::prune_w)
        .def_readwrite("cap", &ReductionConfig::cap)
        .def_readwrite("tau_rec", &ReductionConfig::tau_rec)
        .def_readwrite("merge_dub", &ReductionConfig::merge_dub);
    m.def("reduce",
          [](PMBMDensity& density, const ReductionConfig& config) {
              reduce(density, config);
              return density;
          },
          py::arg("density"), py::arg("config") = ReductionConfig{});

    py::class_<Footprint>(m, "Footprint")
        .def(py::init<>())
        .def_readwrite("position", &Footprint::position)
        .def_readwrite("extent", &Footprint::extent);
    m.def("gwd", &gwd);

    py::class_<GospaResult>(m, "GospaResult")
        .def_readonly("total", &GospaResult::total)
        .def_readonly("localisation", &GospaResult::localisation)
        .def_readonly("missed", &GospaResult::missed)
        .def_readonly("false_", &GospaResult::false_);
    m.def("gospa", &gospa, py::arg("truth"), py::arg("est"), py::arg("c") = 10.0,
          py::arg("p") = 1.0);

    py::class_<Scenario>(m, "Scenario")
        .def(py::init<>())
        .def_readwrite("duration", &Scenario::duration)
        .def_readwrite("seed", &Scenario::seed)
        .def_readwrite("sensor", &Scenario::sensor)
        .def_readwrite("motion", &Scenario::motion)
        .def_readwrite("birth", &Scenario::birth);
    m.def("builtin_scenario", &builtin_scenario);
    m.def("load_scenario", &load_scenario);
    m.def("truth_footprints", &truth_footprints);
    m.def("simulate",
          [](const Scenario& scenario, uint64_t seed) {
              std::mt19937_64 rng(seed);
              std::vector<MeasurementSet> scans;
              for (int k = 0; k < scenario.duration; ++k) {
                  scans.push_back(generate_measurements(scenario, k, rng));
              }
              return scans;
          },
          py::arg("scenario"), py::arg("seed"));

    py::class_<ScanRecord>(m, "ScanRecord")
        .def_readonly("scan", &ScanRecord::scan)
        .def_readonly("gospa", &ScanRecord::gospa)
        .def_readonly("n_hyp", &ScanRecord::n_hyp)
        .def_readonly("n_tracks", &ScanRecord::n_tracks)
        .def_readonly("ppp_mass", &ScanRecord::ppp_mass);
    py::class_<RunConfig>(m, "RunConfig")
        .def(py::init<>())
        .def_readwrite("mc_runs", &RunConfig::mc_runs)
        .def_readwrite("seed", &RunConfig::seed)
        .def_readwrite("out_dir", &RunConfig::out_dir)
        .def_readwrite("exhaustive", &RunConfig::exhaustive);
    py::class_<RunReport>(m, "RunReport")
        .def_readonly("runs", &RunReport::runs)
        .def_readonly("run_wall_ms", &RunReport::run_wall_ms);
    m.def("run",
          [](const Scenario& scenario, const RunConfig& config) {
              return run(scenario, config);
          },
          py::arg("scenario"), py::arg("config") = RunConfig{});
    m.def("ppp_mass_in_region", &ppp_mass_in_region);
}
