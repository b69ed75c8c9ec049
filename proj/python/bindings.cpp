#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>
#include <vector>

#include <nlohmann/json.hpp>

#include "hdsched/analysis.hpp"
#include "hdsched/dp.hpp"
#include "hdsched/experiment.hpp"
#include "hdsched/fading.hpp"
#include "hdsched/policies.hpp"
#include "hdsched/sim.hpp"
#include "hdsched/version.hpp"

namespace py = pybind11;
using namespace hdsched;

namespace {

ExperimentConfig config_from_text(const std::string& text) {
  return ExperimentConfig::from_json(nlohmann::json::parse(text, nullptr, true, true));
}

}  // namespace

PYBIND11_MODULE(_hdsched, m) {
  m.doc() = "Energy-minimal transmission scheduling under a hard deadline";
  m.attr("__version__") = kVersion;

  py::class_<FadingDistribution>(m, "FadingDistribution")
      .def_static("truncated_exponential", &FadingDistribution::truncated_exponential,
                  py::arg("g_min"), py::arg("g_max"))
      .def_static("deterministic", &FadingDistribution::deterministic, py::arg("gain"))
      .def_static("tabulated", &FadingDistribution::tabulated, py::arg("gains"),
                  py::arg("densities"))
      .def_static("tabulated_from_csv", &FadingDistribution::tabulated_from_csv,
                  py::arg("path"))
      .def_property_readonly("g_min", &FadingDistribution::g_min)
      .def_property_readonly("g_max", &FadingDistribution::g_max)
      .def("pdf", &FadingDistribution::pdf, py::arg("gain"))
      .def("cdf", &FadingDistribution::cdf, py::arg("gain"))
      .def("quantile", &FadingDistribution::quantile, py::arg("u"))
      .def("expect",
           py::overload_cast<const std::function<double(double)>&, const char*>(
               &FadingDistribution::expect, py::const_),
           py::arg("h"), py::arg("name") = "python integrand")
      .def("expect",
           py::overload_cast<const std::function<double(double)>&, double, double,
                             const char*>(&FadingDistribution::expect, py::const_),
           py::arg("h"), py::arg("lo"), py::arg("hi"),
           py::arg("name") = "python integrand")
      .def("fractional_moment", &FadingDistribution::fractional_moment, py::arg("order"))
      .def("inverse_gain_geomean", &FadingDistribution::inverse_gain_geomean)
      .def("sample", &FadingDistribution::sample, py::arg("seed"), py::arg("count"))
      .def("id", &FadingDistribution::id)
      .def("__repr__",
           [](const FadingDistribution& d) { return "FadingDistribution(" + d.id() + ")"; });

  py::class_<MomentTable>(m, "MomentTable")
      .def(py::init<const FadingDistribution&, int>(), py::arg("dist"),
           py::arg("max_order"))
      .def_property_readonly("max_order", &MomentTable::max_order)
      .def("moment", &MomentTable::moment, py::arg("order"))
      .def("geo_mean", &MomentTable::geo_mean, py::arg("order"))
      .def("limit", &MomentTable::limit);

  py::class_<Policy, std::shared_ptr<Policy>>(m, "Policy")
      .def("allocate", &Policy::allocate, py::arg("slots_left"), py::arg("backlog"),
           py::arg("gain"))
      .def("name", &Policy::name)
      .def("__repr__", [](const Policy& p) { return "Policy(" + p.name() + ")"; });

  m.def(
      "equal_bit_policy",
      [](double total_bits, int horizon) {
        return std::const_pointer_cast<Policy>(equal_bit_policy(total_bits, horizon));
      },
      py::arg("total_bits"), py::arg("horizon"));
  m.def(
      "boundary_relaxed_policy",
      [](const MomentTable& moments) {
        return std::const_pointer_cast<Policy>(boundary_relaxed_policy(moments));
      },
      py::arg("moments"));
  m.def(
      "one_shot_policy",
      [](const OneShotThresholds& thresholds, double total_bits) {
        return std::const_pointer_cast<Policy>(one_shot_policy(thresholds, total_bits));
      },
      py::arg("thresholds"), py::arg("total_bits"));
  m.def(
      "constrained_ergodic_policy",
      [](const FadingDistribution& dist, double total_bits, int horizon, double delta) {
        return std::const_pointer_cast<Policy>(
            constrained_ergodic_policy(dist, total_bits, horizon, delta));
      },
      py::arg("dist"), py::arg("total_bits"), py::arg("horizon"), py::arg("delta"));
  m.def(
      "optimal_policy",
      [](const ValueTable& table) {
        return std::const_pointer_cast<Policy>(
            optimal_policy(std::make_shared<ValueTable>(table)));
      },
      py::arg("table"));

  m.def("relaxed_threshold", &relaxed_threshold, py::arg("moments"), py::arg("slots_left"));

  py::class_<OneShotThresholds>(m, "OneShotThresholds")
      .def(py::init<const FadingDistribution&, int>(), py::arg("dist"), py::arg("horizon"))
      .def_property_readonly("horizon", &OneShotThresholds::horizon)
      .def("level", &OneShotThresholds::level, py::arg("slots_left"))
      .def("channel_threshold", &OneShotThresholds::channel_threshold,
           py::arg("slots_left"))
      .def("expected_cost", &OneShotThresholds::expected_cost, py::arg("total_bits"));

  py::class_<WaterfillSolution>(m, "WaterfillSolution")
      .def_readonly("threshold", &WaterfillSolution::threshold)
      .def_readonly("mean_rate", &WaterfillSolution::mean_rate)
      .def_readonly("residual", &WaterfillSolution::residual);
  m.def("waterfill_threshold", &waterfill_threshold, py::arg("dist"), py::arg("mean_rate"));
  m.def("ergodic_energy", &ergodic_energy, py::arg("dist"), py::arg("mean_rate"));

  py::class_<GridConfig>(m, "GridConfig")
      .def(py::init([](double beta_max, int n_beta, int n_g) {
             GridConfig g;
             g.beta_max = beta_max;
             g.n_beta = n_beta;
             g.n_g = n_g;
             return g;
           }),
           py::arg("beta_max"), py::arg("n_beta") = 2048, py::arg("n_g") = 512)
      .def_readwrite("beta_max", &GridConfig::beta_max)
      .def_readwrite("n_beta", &GridConfig::n_beta)
      .def_readwrite("n_g", &GridConfig::n_g);

  py::class_<ValueTable>(m, "ValueTable")
      .def_property_readonly("horizon", &ValueTable::horizon)
      .def_property_readonly("distribution_id", &ValueTable::distribution_id)
      .def("cost", &ValueTable::cost, py::arg("slots_left"), py::arg("backlog"))
      .def("cost_derivative", &ValueTable::cost_derivative, py::arg("slots_left"),
           py::arg("backlog"))
      .def("cache_key", &ValueTable::cache_key)
      .def("save", &ValueTable::save, py::arg("path"))
      .def_static("load", &ValueTable::load, py::arg("path"));
  m.def("solve_dp", &solve_dp, py::arg("dist"), py::arg("horizon"), py::arg("grid"));
  m.def("optimal_allocate", &optimal_allocate, py::arg("table"), py::arg("slots_left"),
        py::arg("backlog"), py::arg("gain"));

  py::class_<SimulationReport>(m, "SimulationReport")
      .def_readonly("policy", &SimulationReport::policy)
      .def_readonly("distribution_id", &SimulationReport::distribution_id)
      .def_readonly("total_bits", &SimulationReport::total_bits)
      .def_readonly("horizon", &SimulationReport::horizon)
      .def_readonly("n_trials", &SimulationReport::n_trials)
      .def_readonly("seed", &SimulationReport::seed)
      .def_readonly("mean_energy", &SimulationReport::mean_energy)
      .def_readonly("std_error", &SimulationReport::std_error)
      .def_readonly("per_slot_energy", &SimulationReport::per_slot_energy);
  m.def("simulate", &simulate, py::arg("dist"), py::arg("policy"), py::arg("total_bits"),
        py::arg("horizon"), py::arg("n_trials"), py::arg("seed"));

  m.def("equal_bit_cost", &equal_bit_cost, py::arg("moments"), py::arg("total_bits"),
        py::arg("horizon"));
  m.def("relaxed_cost_closed_form", &relaxed_cost_closed_form, py::arg("moments"),
        py::arg("total_bits"), py::arg("slots"));
  m.def("one_shot_cost", &one_shot_cost, py::arg("dist"), py::arg("total_bits"),
        py::arg("horizon"));

  py::class_<DeltaSearchResult>(m, "DeltaSearchResult")
      .def_readonly("delta", &DeltaSearchResult::delta)
      .def_readonly("cost", &DeltaSearchResult::cost)
      .def_readonly("bracket_warning", &DeltaSearchResult::bracket_warning);
  m.def("optimize_delta", &optimize_delta, py::arg("dist"), py::arg("total_bits"),
        py::arg("horizon"), py::arg("n_trials"), py::arg("seed"));

  m.def("scheduling_gain_db", &scheduling_gain_db, py::arg("moments"),
        py::arg("total_bits"), py::arg("horizon"), py::arg("optimal_cost"));
  m.def("gain_limit_small_b_db", &gain_limit_small_b_db, py::arg("moments"),
        py::arg("thresholds"));
  m.def("gain_limit_large_b_db", &gain_limit_large_b_db, py::arg("moments"),
        py::arg("horizon"));

  py::class_<SnrApproximation>(m, "SnrApproximation")
      .def_readonly("horizon", &SnrApproximation::horizon)
      .def_readonly("high_slope", &SnrApproximation::high_slope)
      .def_readonly("offset_equal", &SnrApproximation::offset_equal)
      .def_readonly("offset_optimal", &SnrApproximation::offset_optimal)
      .def_readonly("offset_ergodic", &SnrApproximation::offset_ergodic)
      .def_readonly("low_slope_equal", &SnrApproximation::low_slope_equal)
      .def_readonly("low_slope_oneshot", &SnrApproximation::low_slope_oneshot)
      .def_readonly("min_energy_per_bit_equal", &SnrApproximation::min_energy_per_bit_equal)
      .def_readonly("min_energy_per_bit_oneshot",
                    &SnrApproximation::min_energy_per_bit_oneshot)
      .def_readonly("min_energy_per_bit_ergodic",
                    &SnrApproximation::min_energy_per_bit_ergodic);
  m.def("high_snr_offsets", &high_snr_offsets, py::arg("moments"), py::arg("horizon"));
  m.def("low_snr_params", &low_snr_params, py::arg("moments"), py::arg("thresholds"));
  m.def("snr_approximation", &snr_approximation, py::arg("moments"), py::arg("thresholds"));

  py::class_<RatePoint>(m, "RatePoint")
      .def_readonly("power", &RatePoint::power)
      .def_readonly("rate", &RatePoint::rate);
  m.def(
      "spectral_efficiency_curve",
      [](const ValueTable& table, const std::vector<double>& powers) {
        return spectral_efficiency_curve(table, powers);
      },
      py::arg("table"), py::arg("powers"));

  py::class_<GainReport>(m, "GainReport")
      .def_readonly("distribution_id", &GainReport::distribution_id)
      .def_readonly("horizon", &GainReport::horizon)
      .def_readonly("total_bits", &GainReport::total_bits)
      .def_readonly("gain_db", &GainReport::gain_db)
      .def_readonly("limit_small_b_db", &GainReport::limit_small_b_db)
      .def_readonly("limit_large_b_db", &GainReport::limit_large_b_db);
  m.def(
      "gain_report",
      [](const MomentTable& moments, const OneShotThresholds& thresholds,
         const ValueTable& table, const std::vector<double>& total_bits) {
        return gain_report(moments, thresholds, table, total_bits);
      },
      py::arg("moments"), py::arg("thresholds"), py::arg("table"), py::arg("total_bits"));

  // Experiment driver, mirroring the CLI: the argument is the JSON config
  // text (comments allowed).  Returns the written report paths.
  m.def(
      "run_experiment", [](const std::string& text) { return run(config_from_text(text)); },
      py::arg("config_text"));
  m.def(
      "validate_config",
      [](const std::string& text) { return validate(config_from_text(text)); },
      py::arg("config_text"));
  m.def(
      "config_hash", [](const std::string& text) { return config_from_text(text).hash(); },
      py::arg("config_text"));
}
