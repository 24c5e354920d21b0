// Python bindings: material checks, configuration round trips, runs and scenarios.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>
#include <sstream>

#include "qcsim/config.hpp"
#include "qcsim/diagnostics.hpp"
#include "qcsim/scenario.hpp"

namespace py = pybind11;
using namespace qcsim;

namespace {

using Overrides = std::map<std::string, std::string>;

std::vector<std::pair<std::string, std::string>> to_pairs(const Overrides& o) { return {o.begin(), o.end()}; }

AdmissibilityMode mode_of(const std::string& s)
{
  if (s == "energy") return AdmissibilityMode::energy;
  if (s == "theorem_linear") return AdmissibilityMode::theorem_linear;
  if (s == "theorem_gyro") return AdmissibilityMode::theorem_gyro;
  throw py::value_error("mode must be energy, theorem_linear or theorem_gyro");
}

// Runs a configuration in memory and returns the per-step ledger as columns.
py::dict run_columns(const std::string& text, const Overrides& overrides)
{
  const RunConfig cfg = parse_config(text, to_pairs(overrides));
  GridPtr grid = build_grid(cfg);
  const FieldState s0 = build_initial_state(cfg, grid);
  Trajectory traj;
  {
    py::gil_scoped_release release;
    traj = run(grid, cfg.material, s0, cfg.solver, cfg.model);
  }
  std::vector<int> step;
  std::vector<double> t, total, kinetic, dissipated, gyro, residual, curl, nut;
  for (const StepRecord& r : traj.steps) {
    step.push_back(r.step);
    t.push_back(r.t);
    total.push_back(r.energy.total);
    kinetic.push_back(r.energy.kinetic);
    dissipated.push_back(r.energy.dissipated_step);
    gyro.push_back(r.energy.gyro_power);
    residual.push_back(r.balance_residual);
    curl.push_back(r.curl_ut_norm);
    nut.push_back(r.nut_norm);
  }
  const BoundReport b = apriori_bound_monitor(traj, cfg.material, derive_coefficients(cfg.material));
  py::dict d;
  d["step"] = step;
  d["t"] = t;
  d["E_total"] = total;
  d["E_kinetic"] = kinetic;
  d["dissipated_step"] = dissipated;
  d["gyro_power"] = gyro;
  d["balance_residual"] = residual;
  d["curl_ut_norm"] = curl;
  d["nut_norm"] = nut;
  d["bound_cbar"] = b.cbar;
  d["bound_max_ratio"] = b.max_ratio;
  d["warnings"] = traj.warnings;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m)
{
  m.doc() = "Small-strain quasicrystal dynamics: elastic displacement coupled to a diffusive phason field";

  py::class_<MaterialParams>(m, "MaterialParams")
      .def(py::init<>())
      .def_readwrite("lambda_", &MaterialParams::lambda)
      .def_readwrite("mu", &MaterialParams::mu)
      .def_readwrite("k0", &MaterialParams::k0)
      .def_readwrite("k1", &MaterialParams::k1)
      .def_readwrite("k2", &MaterialParams::k2)
      .def_readwrite("k2p", &MaterialParams::k2p)
      .def_readwrite("k3", &MaterialParams::k3)
      .def_readwrite("k3p", &MaterialParams::k3p)
      .def_readwrite("rho", &MaterialParams::rho)
      .def_readwrite("varsigma", &MaterialParams::varsigma)
      .def_readwrite("ell", &MaterialParams::ell)
      .def_readwrite("eps_visc", &MaterialParams::eps_visc)
      .def_readwrite("delta_visc", &MaterialParams::delta_visc);

  m.def("derive_coefficients", [](const MaterialParams& p) {
    const DerivedCoefficients c = derive_coefficients(p);
    return std::map<std::string, double>{{"xi", c.xi},   {"xibar", c.xibar}, {"zeta", c.zeta},
                                         {"gamma", c.gamma}, {"kappa", c.kappa}, {"kappa0", c.kappa0}};
  });

  m.def(
      "check_admissibility",
      [](const MaterialParams& p, const std::string& mode) {
        const AdmissibilityReport r = check_admissibility(p, mode_of(mode));
        std::vector<std::string> names;
        for (const auto& v : r.violations) names.push_back(v.name);
        return py::make_tuple(r.pass, names);
      },
      py::arg("params"), py::arg("mode") = "theorem_linear",
      "Returns (pass, names of the violated inequalities).");

  m.def("energy_form_min_eigenvalue", &energy_form_min_eigenvalue);

  m.def(
      "canonical_config",
      [](const std::string& text, const Overrides& overrides) {
        try {
          return emit_config(parse_config(text, to_pairs(overrides)));
        } catch (const ConfigError& e) {
          throw py::value_error(e.what());
        }
      },
      py::arg("text"), py::arg("overrides") = Overrides{}, "Parses a configuration and prints it with every key.");

  m.def("scenario_names", &scenario_names);
  m.def("scenario_config_text", &scenario_config_text);

  m.def(
      "run_scenario",
      [](const std::string& name, const std::string& out_dir, const Overrides& overrides, bool override_gate) {
        RunOptions o;
        o.out_dir = out_dir;
        o.overrides = to_pairs(overrides);
        o.override_gate = override_gate;
        std::ostringstream log;
        int code;
        {
          py::gil_scoped_release release;
          code = run_scenario(name, o, log);
        }
        return std::make_pair(code, log.str());
      },
      py::arg("name"), py::arg("out_dir"), py::arg("overrides") = Overrides{}, py::arg("override_gate") = false,
      "Writes the scenario bundle into out_dir; returns (exit code, log text).");

  m.def(
      "simulate",
      [](const std::string& text, const std::string& out_dir, const Overrides& overrides, bool override_gate) {
        std::ostringstream log;
        RunConfig cfg;
        try {
          cfg = parse_config(text, to_pairs(overrides));
        } catch (const ConfigError& e) {
          return std::make_pair(static_cast<int>(kExitConfig), std::string(e.what()));
        }
        int code;
        {
          py::gil_scoped_release release;
          code = simulate(cfg, out_dir, override_gate, log);
        }
        return std::make_pair(code, log.str());
      },
      py::arg("text"), py::arg("out_dir"), py::arg("overrides") = Overrides{}, py::arg("override_gate") = false);

  m.def(
      "run",
      [](const std::string& text, const Overrides& overrides) {
        try {
          return run_columns(text, overrides);
        } catch (const ConfigError& e) {
          throw py::value_error(e.what());
        }
      },
      py::arg("text"), py::arg("overrides") = Overrides{},
      "Runs a configuration without the gate or output files; returns the per-step ledger.");

  m.attr("EXIT_OK") = static_cast<int>(kExitOk);
  m.attr("EXIT_IO") = static_cast<int>(kExitIo);
  m.attr("EXIT_CONFIG") = static_cast<int>(kExitConfig);
  m.attr("EXIT_GATE") = static_cast<int>(kExitGate);
  m.attr("EXIT_NUMERICAL") = static_cast<int>(kExitNumerical);

  py::register_exception<NumericalFailure>(m, "NumericalFailure", PyExc_RuntimeError);
}
