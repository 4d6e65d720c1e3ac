#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <span>

#include "satin/app/config.hpp"
#include "satin/app/runner.hpp"
#include "satin/cavity.hpp"
#include "satin/dicke.hpp"
#include "satin/noise.hpp"
#include "satin/protocol.hpp"
#include "satin/stats.hpp"
#include "satin/wigner.hpp"

namespace py = pybind11;
using namespace satin;

namespace {

py::array_t<std::complex<double>> amplitudes_array(const DickeState& s) {
  const auto a = s.amplitudes();
  return py::array_t<std::complex<double>>(static_cast<py::ssize_t>(a.size()), a.data());
}

py::array_t<double> to_array(const std::vector<double>& v) {
  return py::array_t<double>(static_cast<py::ssize_t>(v.size()), v.data());
}

py::object cell_to_py(const app::Cell& c) {
  return std::visit([](const auto& v) -> py::object { return py::cast(v); }, c);
}

py::dict report_to_dict(const app::Report& r) {
  py::dict out;
  out["columns"] = r.table.columns;
  py::list rows;
  for (const auto& row : r.table.rows) {
    py::list cells;
    for (const auto& c : row) cells.append(cell_to_py(c));
    rows.append(cells);
  }
  out["rows"] = rows;
  py::dict summary;
  for (const auto& [k, v] : r.summary.entries) summary[py::str(k)] = cell_to_py(v);
  out["summary"] = summary;
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Collective-spin simulation of cavity twisting, untwisting and signal amplification.";

  py::register_exception<NoSolutionError>(m, "NoSolutionError", PyExc_RuntimeError);
  py::register_exception<app::ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<app::NumericError>(m, "NumericError", PyExc_ArithmeticError);

  py::enum_<Axis>(m, "Axis").value("x", Axis::x).value("y", Axis::y).value("z", Axis::z);

  py::class_<DickeState>(m, "DickeState")
      .def(py::init([](int n, const std::vector<cplx>& amps) { return DickeState(n, amps); }), py::arg("n_atoms"),
           py::arg("amplitudes"))
      .def_property_readonly("n_atoms", &DickeState::n_atoms)
      .def_property_readonly("spin", &DickeState::spin)
      .def_property_readonly("amplitudes", &amplitudes_array)
      .def("norm_sq", &DickeState::norm_sq)
      .def("__len__", &DickeState::dim);

  py::class_<SpinMoments>(m, "SpinMoments")
      .def_readonly("mean_sx", &SpinMoments::mean_sx)
      .def_readonly("mean_sy", &SpinMoments::mean_sy)
      .def_readonly("mean_sz", &SpinMoments::mean_sz)
      .def_readonly("var_sx", &SpinMoments::var_sx)
      .def_readonly("var_sy", &SpinMoments::var_sy)
      .def_readonly("var_sz", &SpinMoments::var_sz)
      .def_readonly("contrast", &SpinMoments::contrast);

  m.def("make_css", &make_css, py::arg("n_atoms"), py::arg("polar"), py::arg("azimuth"));
  m.def("rotate", [](const DickeState& s, Axis axis, double angle) { return rotate(s, {axis, angle}); },
        py::arg("state"), py::arg("axis"), py::arg("angle"));
  m.def("oat_evolve", &oat_evolve, py::arg("state"), py::arg("q_tilde"));
  m.def("moments", &moments, py::arg("state"));
  m.def(
      "measure_distribution",
      [](const DickeState& s, Axis axis) { return to_array(measure_distribution(s, axis)); }, py::arg("state"),
      py::arg("axis"));

  py::class_<CavityConfig>(m, "CavityConfig")
      .def(py::init<>())
      .def_readwrite("eta", &CavityConfig::eta)
      .def_readwrite("kappa", &CavityConfig::kappa)
      .def_readwrite("gamma", &CavityConfig::gamma)
      .def_readwrite("finesse", &CavityConfig::finesse)
      .def_readwrite("n_atoms", &CavityConfig::n_atoms)
      .def_readwrite("x_a", &CavityConfig::x_a)
      .def_readwrite("x_c", &CavityConfig::x_c)
      .def_readwrite("n_tr_tot", &CavityConfig::n_tr_tot);

  m.def("shearing_strength", &shearing_strength, py::arg("cfg"));
  m.def("excess_broadening", &excess_broadening, py::arg("cfg"));
  m.def("scattered_photons", &scattered_photons, py::arg("cfg"));
  m.def("photons_for_twist", &photons_for_twist, py::arg("cfg"), py::arg("q_target"));

  py::class_<DetuningResult>(m, "DetuningResult")
      .def_readonly("cfg", &DetuningResult::cfg)
      .def_readonly("gain_db", &DetuningResult::gain_db);
  m.def(
      "optimize_detuning", [](const CavityConfig& cfg, double q) { return optimize_detuning(cfg, q); },
      py::arg("cfg"), py::arg("q_target"));

  py::class_<NoiseBudget>(m, "NoiseBudget")
      .def(py::init<>())
      .def_readwrite("i_plus", &NoiseBudget::i_plus)
      .def_readwrite("i_minus", &NoiseBudget::i_minus)
      .def_readwrite("contrast_sc", &NoiseBudget::contrast_sc)
      .def_readwrite("sigma_meas_sq", &NoiseBudget::sigma_meas_sq)
      .def_readwrite("sigma_d_sq", &NoiseBudget::sigma_d_sq);
  m.def("pair_noise", &pair_noise, py::arg("cfg"), py::arg("q_plus"), py::arg("q_minus"),
        py::arg("sigma_meas_sq") = 0.15);
  m.def(
      "predict_untwist_variance",
      [](const CavityConfig& cfg, double qp, double qm, double meas) {
        return predict_untwist_variance(cfg, qp, qm, meas).sigma_y_sq;
      },
      py::arg("cfg"), py::arg("q_plus"), py::arg("q_minus"), py::arg("sigma_meas_sq") = 0.15);

  py::class_<RunResult>(m, "RunResult")
      .def_readonly("mean_sy_norm", &RunResult::mean_sy_norm)
      .def_readonly("sigma_y_sq", &RunResult::sigma_y_sq)
      .def_readonly("amplification_m", &RunResult::amplification_m)
      .def_readonly("gain_db", &RunResult::gain_db)
      .def_readonly("moments", &RunResult::moments)
      .def_property_readonly("shots", [](const RunResult& r) { return to_array(r.shots); });

  m.def(
      "satin_run",
      [](double qp, double qm, double phi, int n, std::optional<NoiseBudget> noise, std::optional<std::uint64_t> seed,
         int shots) {
        RunOptions o;
        o.noise = noise;
        o.seed = seed;
        o.n_shots = shots;
        return satin_run(qp, qm, phi, n, o);
      },
      py::arg("q_plus"), py::arg("q_minus"), py::arg("phi"), py::arg("n_atoms"), py::arg("noise") = py::none(),
      py::arg("seed") = py::none(), py::arg("shots") = 0);
  m.def("exact_amplification", &exact_amplification, py::arg("q_plus"), py::arg("q_minus"), py::arg("n_atoms"));
  m.def("amplification_analytic", &amplification_analytic, py::arg("q_tilde"), py::arg("n_atoms"),
        py::arg("contrast") = 1.0);
  m.def("gain_db", &gain_db, py::arg("m"), py::arg("sigma_y_sq"));

  py::class_<IdealOptimum>(m, "IdealOptimum")
      .def_readonly("n_atoms", &IdealOptimum::n_atoms)
      .def_readonly("q", &IdealOptimum::q)
      .def_readonly("m", &IdealOptimum::m)
      .def_readonly("gain_db", &IdealOptimum::gain_db);
  m.def("ideal_optimum", &ideal_optimum, py::arg("n_atoms"));

  py::class_<ModelPoint>(m, "ModelPoint")
      .def_readonly("n_atoms", &ModelPoint::n_atoms)
      .def_readonly("q", &ModelPoint::q)
      .def_readonly("m", &ModelPoint::m)
      .def_readonly("sigma_y_sq", &ModelPoint::sigma_y_sq)
      .def_readonly("gain_db", &ModelPoint::gain_db)
      .def_readonly("detuning", &ModelPoint::detuning);
  m.def(
      "cavity_model_optimum", [](const CavityConfig& base) { return cavity_model_optimum(base); }, py::arg("base"));

  py::class_<HlBudget>(m, "HlBudget")
      .def_readonly("q_ideal", &HlBudget::q_ideal)
      .def_readonly("q_model", &HlBudget::q_model)
      .def_readonly("ideal_db", &HlBudget::ideal_db)
      .def_readonly("q_shift_db", &HlBudget::q_shift_db)
      .def_readonly("contrast_db", &HlBudget::contrast_db)
      .def_readonly("non_unitary_db", &HlBudget::non_unitary_db)
      .def_readonly("resolution_db", &HlBudget::resolution_db)
      .def_readonly("hl_distance_db", &HlBudget::hl_distance_db);
  m.def(
      "hl_budget", [](const CavityConfig& base) { return hl_budget(base); }, py::arg("base"));

  py::enum_<NoiseSource>(m, "NoiseSource")
      .value("ideal", NoiseSource::ideal)
      .value("cavity_model", NoiseSource::cavity_model);
  py::class_<ScalingResult>(m, "ScalingResult")
      .def_readonly("atom_numbers", &ScalingResult::atom_numbers)
      .def_readonly("optimal_q", &ScalingResult::optimal_q)
      .def_readonly("gains_db", &ScalingResult::gains_db)
      .def_readonly("hl_distance_db", &ScalingResult::hl_distance_db)
      .def_readonly("fit_slope", &ScalingResult::fit_slope)
      .def_readonly("fit_intercept", &ScalingResult::fit_intercept);
  m.def(
      "heisenberg_sweep", [](const std::vector<int>& ns, NoiseSource src) { return heisenberg_sweep(ns, src); },
      py::arg("atom_numbers"), py::arg("source"));

  m.def(
      "allan_deviation",
      [](const std::vector<double>& record, double period) {
        const AllanResult a = allan_deviation(record, period);
        return py::make_tuple(to_array(a.tau), to_array(a.adev));
      },
      py::arg("record"), py::arg("sample_period"));

  m.def(
      "wigner_grid",
      [](const DickeState& s, int n_polar, int n_azimuth) {
        const SphereGrid g = wigner_grid(s, n_polar, n_azimuth);
        py::array_t<double> w({g.n_polar, g.n_azimuth});
        std::copy(g.values.begin(), g.values.end(), w.mutable_data());
        return py::make_tuple(w, integrate(g), g.max_imag);
      },
      py::arg("state"), py::arg("n_polar"), py::arg("n_azimuth"),
      "Returns (values[n_polar, n_azimuth], integral, max_imag).");

  m.def(
      "run_config",
      [](const std::string& text, int workers, std::optional<std::uint64_t> seed) {
        const app::ExperimentConfig cfg = app::parse_config(text, seed);
        app::Report r;
        {
          py::gil_scoped_release release;
          r = app::run_experiment(cfg, workers);
        }
        return report_to_dict(r);
      },
      py::arg("config_text"), py::arg("workers") = 1, py::arg("seed") = py::none(),
      "Runs a JSON experiment config and returns {columns, rows, summary}.");

  m.attr("__version__") = app::artifact_version();
}
