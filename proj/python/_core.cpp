#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "hetcache/deployment.hpp"
#include "hetcache/montecarlo.hpp"
#include "hetcache/optimizer.hpp"
#include "hetcache/scenario.hpp"

namespace py = pybind11;
using namespace hetcache;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Capacity and cache planning for two-tier cellular networks";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<InvalidParameter>(m, "InvalidParameter", base.ptr());
  py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<LowSnrError>(m, "LowSnrError", base.ptr());
  py::register_exception<InfeasiblePart>(m, "InfeasiblePart", base.ptr());
  py::register_exception<RegimeError>(m, "RegimeError", base.ptr());
  py::register_exception<CatalogTooSmall>(m, "CatalogTooSmall", base.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<ParseError>(m, "ParseError", base.ptr());

  py::enum_<Part>(m, "Part")
      .value("MR", Part::MR)
      .value("MBH", Part::MBH)
      .value("SR", Part::SR)
      .value("SBH", Part::SBH);

  py::class_<NetworkParams>(m, "NetworkParams")
      .def(py::init<>())
      .def_static("reference", &NetworkParams::reference)
      .def_readwrite("mbs_side_km", &NetworkParams::mbs_side_km)
      .def_readwrite("sbs_density", &NetworkParams::sbs_density)
      .def_readwrite("mbs_bandwidth_hz", &NetworkParams::mbs_bandwidth_hz)
      .def_readwrite("sbs_bandwidth_hz", &NetworkParams::sbs_bandwidth_hz)
      .def_readwrite("mbs_power_w", &NetworkParams::mbs_power_w)
      .def_readwrite("sbs_power_w", &NetworkParams::sbs_power_w)
      .def_readwrite("pathloss_mbs", &NetworkParams::pathloss_mbs)
      .def_readwrite("pathloss_sbs", &NetworkParams::pathloss_sbs)
      .def_readwrite("noise_w", &NetworkParams::noise_w)
      .def_readwrite("interference_ratio_mbs", &NetworkParams::interference_ratio_mbs)
      .def_readwrite("interference_ratio_sbs", &NetworkParams::interference_ratio_sbs)
      .def_readwrite("sinr_cap", &NetworkParams::sinr_cap)
      .def_readwrite("mbs_backhaul_bps", &NetworkParams::mbs_backhaul_bps)
      .def_readwrite("sbs_backhaul_bps", &NetworkParams::sbs_backhaul_bps)
      .def_readwrite("rate_req_ran_bps", &NetworkParams::rate_req_ran_bps)
      .def_readwrite("rate_req_bh_bps", &NetworkParams::rate_req_bh_bps)
      .def_readwrite("gamma_shape", &NetworkParams::gamma_shape)
      .def("mbs_density", &NetworkParams::mbs_density)
      .def("min_distance_m", &NetworkParams::min_distance_m)
      .def("validate", &NetworkParams::validate);

  m.attr("CALIBRATED_SBS_BACKHAUL_BPS") = kCalibratedSbsBackhaulBps;

  py::class_<PopularityModel>(m, "PopularityModel")
      .def_static("zipf", &PopularityModel::zipf, py::arg("files"), py::arg("skewness"))
      .def_property_readonly("file_count", &PopularityModel::file_count)
      .def_property_readonly("skewness", &PopularityModel::skewness)
      .def_property_readonly("probabilities",
                             [](const PopularityModel& pm) {
                               auto q = pm.probabilities();
                               return std::vector<double>(q.begin(), q.end());
                             })
      .def("cumulative", &PopularityModel::cumulative)
      .def("inverse_cumulative", &PopularityModel::inverse_cumulative);

  py::class_<HitRates>(m, "HitRates")
      .def(py::init<double, double, double>(), py::arg("sbs") = 0.0, py::arg("mbs") = 0.0,
           py::arg("total") = 0.0)
      .def_readwrite("sbs", &HitRates::sbs)
      .def_readwrite("mbs", &HitRates::mbs)
      .def_readwrite("total", &HitRates::total);

  m.def("hit_rates", py::overload_cast<const PopularityModel&, double, double>(&hit_rates),
        py::arg("model"), py::arg("sbs_cache"), py::arg("mbs_cache"));

  py::class_<LoadCaps>(m, "LoadCaps")
      .def(py::init<>())
      .def_readwrite("mr", &LoadCaps::mr)
      .def_readwrite("mbh", &LoadCaps::mbh)
      .def_readwrite("sr", &LoadCaps::sr)
      .def_readwrite("sbh", &LoadCaps::sbh)
      .def_readonly("feasible", &LoadCaps::feasible);

  m.def("noise_power_w", &noise_power_w, py::arg("dbm_per_mhz"), py::arg("bandwidth_hz"));
  m.def("gamma_ratio", &gamma_ratio);
  m.def("poisson_share", &poisson_share);
  m.def("gamma_poisson_share", &gamma_poisson_share);
  m.def("spectrum_efficiency_mbs", &spectrum_efficiency_mbs);
  m.def("spectrum_efficiency_sbs", &spectrum_efficiency_sbs);
  m.def("mean_rate_mbs_backhaul", &mean_rate_mbs_backhaul);
  m.def("mean_rate_sbs_backhaul", &mean_rate_sbs_backhaul);
  m.def("mean_rate_mbs_radio", &mean_rate_mbs_radio);
  m.def("mean_rate_sbs_radio", &mean_rate_sbs_radio);
  m.def(
      "cap_loads",
      [](const NetworkParams& p, bool lenient) {
        return cap_loads(p, lenient ? CapMode::kLenient : CapMode::kStrict);
      },
      py::arg("params"), py::arg("lenient") = false);

  py::class_<TierLoadProfile>(m, "TierLoadProfile")
      .def(py::init<double, double, double, double>(), py::arg("mr") = 0.0, py::arg("mbh") = 0.0,
           py::arg("sr") = 0.0, py::arg("sbh") = 0.0)
      .def_readwrite("mr", &TierLoadProfile::mr)
      .def_readwrite("mbh", &TierLoadProfile::mbh)
      .def_readwrite("sr", &TierLoadProfile::sr)
      .def_readwrite("sbh", &TierLoadProfile::sbh);

  py::class_<CapacityBreakdown>(m, "CapacityBreakdown")
      .def_readonly("mr", &CapacityBreakdown::mr)
      .def_readonly("mbh", &CapacityBreakdown::mbh)
      .def_readonly("sr", &CapacityBreakdown::sr)
      .def_readonly("sbh", &CapacityBreakdown::sbh)
      .def_readonly("mu", &CapacityBreakdown::mu)
      .def_readonly("bottleneck", &CapacityBreakdown::bottleneck);

  m.def("load_profile", &load_profile, py::arg("hits"), py::arg("steering"), py::arg("load"));
  m.def("capacity", &capacity, py::arg("caps"), py::arg("hits"), py::arg("steering"));

  py::class_<Thresholds>(m, "Thresholds")
      .def_readonly("c_min", &Thresholds::c_min)
      .def_readonly("c_max", &Thresholds::c_max);

  py::class_<OptimalPlan>(m, "OptimalPlan")
      .def_property_readonly("regime",
                             [](const OptimalPlan& pl) { return std::string(to_string(pl.regime)); })
      .def_readonly("budget", &OptimalPlan::budget)
      .def_readonly("sbs_cache", &OptimalPlan::sbs_cache)
      .def_readonly("mbs_cache", &OptimalPlan::mbs_cache)
      .def_readonly("steering", &OptimalPlan::steering)
      .def_readonly("mu", &OptimalPlan::mu)
      .def_readonly("hits", &OptimalPlan::hits)
      .def_readonly("breakdown", &OptimalPlan::breakdown)
      .def_readonly("thresholds", &OptimalPlan::thresholds)
      .def("xi_c", &OptimalPlan::xi_c);

  m.def(
      "classify_regime", [](const LoadCaps& caps) { return std::string(to_string(classify_regime(caps))); });
  m.def("thresholds", py::overload_cast<const NetworkParams&, const PopularityModel&>(&thresholds));
  m.def("solve_analytic",
        py::overload_cast<const NetworkParams&, const PopularityModel&, double>(&solve_analytic),
        py::arg("params"), py::arg("model"), py::arg("budget"));
  m.def(
      "grid_search",
      [](const NetworkParams& p, const PopularityModel& model, double budget, int n_cs, int n_phi) {
        return grid_search(p, model, budget, GridSize{n_cs, n_phi});
      },
      py::arg("params"), py::arg("model"), py::arg("budget"), py::arg("cs_points") = 200,
      py::arg("phi_points") = 200);

  m.def("required_cache_budget", &required_cache_budget, py::arg("params"), py::arg("model"),
        py::arg("sbs_backhaul_bps"));
  m.def(
      "calibrate_sbs_backhaul",
      [](const NetworkParams& p, const PopularityModel& model, double target) {
        const Calibration c = calibrate_sbs_backhaul(p, model, target);
        return py::make_tuple(c.sbs_backhaul_bps, c.c_min, c.c_max);
      },
      py::arg("params"), py::arg("model"), py::arg("target_mid") = 900.0);

  py::class_<SimConfig>(m, "SimConfig")
      .def(py::init<>())
      .def_readwrite("window_km", &SimConfig::window_km)
      .def_readwrite("trials", &SimConfig::trials)
      .def_readwrite("seed", &SimConfig::seed)
      .def_readwrite("mbs_fraction", &SimConfig::mbs_fraction)
      .def_readwrite("threads", &SimConfig::threads)
      .def_property(
          "sampled_interference",
          [](const SimConfig& c) { return c.interference == InterferenceMode::kSampled; },
          [](SimConfig& c, bool v) {
            c.interference = v ? InterferenceMode::kSampled : InterferenceMode::kMeanField;
          });

  m.def(
      "empirical_rates",
      [](const NetworkParams& p, const TierLoadProfile& loads, const SimConfig& cfg) {
        const EmpiricalRates r = empirical_rates(p, loads, cfg);
        py::dict out;
        out["MR"] = py::make_tuple(r.mr.mean, r.mr.std_error);
        out["MBH"] = py::make_tuple(r.mbh.mean, r.mbh.std_error);
        out["SR"] = py::make_tuple(r.sr.mean, r.sr.std_error);
        out["SBH"] = py::make_tuple(r.sbh.mean, r.sbh.std_error);
        return out;
      },
      py::arg("params"), py::arg("loads"), py::arg("config"));

  m.def(
      "run_scenario",
      [](const std::string& text, const std::filesystem::path& out_dir) {
        RunOptions options;
        options.out_dir = out_dir;
        std::ostringstream summary;
        const auto files = run_scenario(parse_scenario(text), options, summary);
        return py::make_tuple(files, summary.str());
      },
      py::arg("scenario_json"), py::arg("out_dir"));
}
