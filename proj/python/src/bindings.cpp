// SPDX-License-Identifier: Apache-2.0
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "pgi/config.hpp"
#include "pgi/core_model.hpp"
#include "pgi/errors.hpp"
#include "pgi/feedback.hpp"
#include "pgi/path_selection.hpp"
#include "pgi/random.hpp"
#include "pgi/rate_analysis.hpp"
#include "pgi/sim_harness.hpp"
#include "pgi/sweep_io.hpp"
#include "pgi/theory_bounds.hpp"

namespace py = pybind11;
using namespace pgi;

namespace {

// Closed-form per-user ideal rates of the dominating selection in one seeded scenario.
py::dict scenario_ideal_rates(const SystemConfig& config, std::uint64_t seed) {
  config.validate();
  const Geometry geo = draw_scenario(config, seed);
  const auto steering = steering_from_angles(geo.path_aods, config.num_antennas, config.spacing_ratio);
  const double s2 = calibrate_noise_variance_selected(steering, config.path_budget, config.snr_db);
  const SelectionState st = select_dominating_paths(steering, config.path_budget, s2);
  py::list deltas;
  for (int k = 0; k < config.num_users; ++k)
    deltas.append(delta_factor(selected_gain_matrix(steering, st, k)).value);
  py::dict out;
  out["noise_var"] = s2;
  out["rates"] = ideal_rate_closed_form(steering, st, s2);
  out["delta"] = deltas;
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Path-gain feedback simulator for cell-free downlink";

  py::register_exception<InfeasibleBound>(m, "InfeasibleBound", PyExc_ValueError);
  py::register_exception<SchemaError>(m, "SchemaError", PyExc_ValueError);

  py::enum_<Scheme>(m, "Scheme")
      .value("proposed", Scheme::proposed)
      .value("rvq_csi", Scheme::rvq_csi)
      .value("random_path", Scheme::random_path)
      .value("ideal_pgi", Scheme::ideal_pgi);

  py::class_<SystemConfig>(m, "SystemConfig")
      .def(py::init<>())
      .def_readwrite("num_bs", &SystemConfig::num_bs)
      .def_readwrite("num_users", &SystemConfig::num_users)
      .def_readwrite("num_antennas", &SystemConfig::num_antennas)
      .def_readwrite("num_paths", &SystemConfig::num_paths)
      .def_readwrite("path_budget", &SystemConfig::path_budget)
      .def_readwrite("feedback_bits", &SystemConfig::feedback_bits)
      .def_readwrite("snr_db", &SystemConfig::snr_db)
      .def_readwrite("spacing_ratio", &SystemConfig::spacing_ratio)
      .def_readwrite("angular_spread", &SystemConfig::angular_spread)
      .def_readwrite("area_side", &SystemConfig::area_side)
      .def_readwrite("pilot_noise_var", &SystemConfig::pilot_noise_var)
      .def_readwrite("pilot_noise_equals_data_noise", &SystemConfig::pilot_noise_equals_data_noise)
      .def_readwrite("master_seed", &SystemConfig::master_seed)
      .def_readwrite("trials", &SystemConfig::trials)
      .def_readwrite("use_estimated_aods", &SystemConfig::use_estimated_aods)
      .def_readwrite("music_snapshots", &SystemConfig::music_snapshots)
      .def_readwrite("music_snr_db", &SystemConfig::music_snr_db)
      .def_readwrite("codebook_seed_offset", &SystemConfig::codebook_seed_offset)
      .def_readwrite("baselines", &SystemConfig::baselines)
      .def_readwrite("gain_draws", &SystemConfig::gain_draws)
      .def_readwrite("threads", &SystemConfig::threads)
      .def("validate", &SystemConfig::validate)
      .def("snapshot", [](const SystemConfig& c) { return config_snapshot(c); });

  m.def("parse_config", &parse_config, py::arg("text"));
  m.def("load_config", &load_config, py::arg("path"));
  m.def("single_bs_preset", &single_bs_preset);
  m.def("derive_seed", [](std::uint64_t base, const std::vector<std::uint64_t>& idx) {
    switch (idx.size()) {
      case 1: return derive_seed(base, {idx[0]});
      case 2: return derive_seed(base, {idx[0], idx[1]});
      case 3: return derive_seed(base, {idx[0], idx[1], idx[2]});
      default: throw std::invalid_argument("derive_seed: between one and three indices");
    }
  }, py::arg("base"), py::arg("indices"));

  m.def("steering_vector", &steering_vector, py::arg("theta"), py::arg("n"), py::arg("spacing_ratio") = 0.5);

  py::class_<RvqGamma>(m, "RvqGamma")
      .def_readonly("gamma", &RvqGamma::gamma)
      .def_readonly("complement", &RvqGamma::complement)
      .def_readonly("bound", &RvqGamma::bound);
  py::class_<DistortionBound>(m, "DistortionBound")
      .def_readonly("closed_form", &DistortionBound::closed_form)
      .def_readonly("weighted_bound", &DistortionBound::weighted_bound)
      .def_readonly("simple_bound", &DistortionBound::simple_bound)
      .def_readonly("degenerate", &DistortionBound::degenerate);

  m.def("beta_function", &beta_function, py::arg("a"), py::arg("b"));
  m.def("rvq_gamma", &rvq_gamma, py::arg("bits"), py::arg("dim"));
  m.def("delta_factor", [](const CMatrix& x) { return delta_factor(x).value; }, py::arg("x"));
  m.def("distortion_bound", &distortion_bound, py::arg("dim"), py::arg("bits"), py::arg("delta"));
  m.def("rate_gap_bound", &rate_gap_bound, py::arg("dim"), py::arg("bits"), py::arg("delta"), py::arg("snr"));
  m.def("bits_for_rate_gap", &bits_for_rate_gap, py::arg("dim"), py::arg("delta"), py::arg("snr"),
        py::arg("beta"));
  m.def("single_cell_rate_bound", &single_cell_rate_bound, py::arg("dim"), py::arg("bits"), py::arg("delta"),
        py::arg("noise_var"), py::arg("snr"));
  m.def("choose_path_budget_single_cell",
        [](int num_paths, int bits, double snr, double noise_var) {
          const BudgetChoice c = choose_path_budget_single_cell(num_paths, bits, snr, noise_var);
          return py::make_tuple(c.budget, c.objective);
        },
        py::arg("num_paths"), py::arg("bits"), py::arg("snr"), py::arg("noise_var"));

  m.def("rvq_codebook", [](int dim, int bits, std::uint64_t seed) { return gen_rvq_codebook(dim, bits, seed).words; },
        py::arg("dim"), py::arg("bits"), py::arg("seed"));
  m.def("quantize",
        [](const CVector& g, int bits, std::uint64_t seed) {
          const Codebook book = gen_rvq_codebook(static_cast<int>(g.size()), bits, seed);
          const FeedbackMessage msg = quantize_pgi(g, book);
          return py::make_tuple(msg.index, msg.magnitude, reconstruct_pgi(msg, book));
        },
        py::arg("gains"), py::arg("bits"), py::arg("seed"));

  m.def("scenario_ideal_rates", &scenario_ideal_rates, py::arg("config"), py::arg("seed"));

  py::class_<TrialResult>(m, "TrialResult")
      .def_readonly("seed", &TrialResult::seed)
      .def_readonly("failed", &TrialResult::failed)
      .def_readonly("error", &TrialResult::error)
      .def_readonly("noise_var", &TrialResult::noise_var)
      .def_readonly("schemes", &TrialResult::schemes)
      .def_readonly("user_rates", &TrialResult::user_rates)
      .def_readonly("music_shortfalls", &TrialResult::music_shortfalls)
      .def_readonly("regularized_pilots", &TrialResult::regularized_pilots)
      .def("sum_rate", &TrialResult::sum_rate, py::arg("scheme"));
  m.def("run_trial", &run_trial, py::arg("config"), py::arg("seed"), py::call_guard<py::gil_scoped_release>());

  py::class_<SeriesPoint>(m, "SeriesPoint")
      .def_readonly("mean", &SeriesPoint::mean)
      .def_readonly("ci95", &SeriesPoint::ci95)
      .def_readonly("trials", &SeriesPoint::trials)
      .def_readonly("failed", &SeriesPoint::failed);
  py::class_<SweepSeries>(m, "SweepSeries")
      .def_readonly("scheme", &SweepSeries::scheme)
      .def_readonly("points", &SweepSeries::points);
  py::class_<SweepResult>(m, "SweepResult")
      .def_readonly("axis_name", &SweepResult::axis_name)
      .def_readonly("axis_values", &SweepResult::axis_values)
      .def_readonly("series", &SweepResult::series)
      .def_readonly("master_seed", &SweepResult::master_seed)
      .def("find", &SweepResult::find, py::arg("scheme"), py::return_value_policy::reference_internal)
      .def("to_table", [](const SweepResult& r) { return format_sweep(r); });
  m.def("run_sweep", &run_sweep, py::arg("config"), py::arg("axis"), py::arg("values"), py::arg("trials"),
        py::call_guard<py::gil_scoped_release>());
  m.def("parse_sweep", &parse_sweep, py::arg("text"));
  m.def("git_blob_digest", &git_blob_digest, py::arg("content"));
}
