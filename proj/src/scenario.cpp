#include "qcsim/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <ostream>
#include <sstream>

#include "qcsim/diagnostics.hpp"
#include "qcsim/grid_ops.hpp"
#include "qcsim/output.hpp"

namespace qcsim {

std::filesystem::path resolve_output_dir(const std::string& directory)
{
  const std::filesystem::path dir(directory);
  if (dir.is_absolute()) return dir;
  if (const char* root = std::getenv(kOutputRootEnv); root && *root) return std::filesystem::path(root) / dir;
  return dir;
}

GateReport evaluate_gate(const RunConfig& cfg, const Grid& grid, const FieldState& s0)
{
  GateReport r = check_theorem_hypotheses(cfg.material, grid, s0, cfg.model);
  if (cfg.gate == GateMode::theorem) return r;

  // Swap the material part for the energy-mode checks.
  const AdmissibilityReport theorem = r.material;
  std::vector<std::string> rest;
  for (const std::string& f : r.failures)
    if (!theorem.violates(f)) rest.push_back(f);
  r.material = check_admissibility(cfg.material, AdmissibilityMode::energy);
  r.failures.clear();
  for (const auto& v : r.material.violations) r.failures.push_back(v.name);
  r.failures.insert(r.failures.end(), rest.begin(), rest.end());
  r.pass = r.failures.empty();
  return r;
}

namespace {

void log_gate(std::ostream& out, const GateReport& g, GateMode mode)
{
  out << "gate mode: " << (mode == GateMode::energy ? "energy" : "theorem") << "\n";
  out << "gate: " << (g.pass ? "pass" : "FAIL") << "\n";
  for (const auto& v : g.material.violations)
    out << "  violated: " << v.name << " (" << format_double(v.lhs) << " vs " << format_double(v.rhs)
        << (v.marginal ? ", marginal" : "") << ")\n";
  for (const auto& w : g.material.warnings) out << "  warning: " << w.name << " is marginal\n";
  out << "  ||u0||_{1,2} = " << format_double(g.h1_u0) << "\n";
  out << "  ||u_t(0)|| = " << format_double(g.l2_ut0) << "\n";
  out << "  ||nu0||_{1,2} = " << format_double(g.h1_nu0) << "\n";
  if (g.gyro_checked)
    out << "  ell*||u_t(0)||_{1,2} = " << format_double(g.gyro_lhs) << " vs varsigma/2 = " << format_double(g.gyro_rhs)
        << "\n";
  for (const std::string& f : g.failures)
    if (!g.material.violates(f)) out << "  failed: " << f << "\n";
}

void log_coefficients(std::ostream& out, const DerivedCoefficients& c)
{
  out << "derived coefficients:\n";
  out << "  xi = " << format_double(c.xi) << "\n";
  out << "  xibar = " << format_double(c.xibar) << "\n";
  out << "  zeta = " << format_double(c.zeta) << "\n";
  out << "  gamma = " << format_double(c.gamma) << "\n";
  out << "  kappa = " << format_double(c.kappa) << "\n";
  out << "  kappa0 = " << format_double(c.kappa0) << "\n";
}

std::string snapshot_name(int step)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "step_%06d.txt", step);
  return buf;
}

template <class F>
std::string to_text(F&& f)
{
  std::ostringstream s;
  f(s);
  return s.str();
}

void summarize_trajectory(std::ostream& out, const Trajectory& traj, const BoundReport& bound)
{
  double max_res = 0.0, max_gyro = 0.0;
  int picard = 0, krylov = 0;
  for (std::size_t n = 1; n < traj.steps.size(); ++n) {
    const StepRecord& r = traj.steps[n];
    max_res = std::max(max_res, r.balance_residual);
    const double scale = r.curl_ut_norm * r.nut_norm * r.nut_norm;
    if (r.energy.gyro_power != 0.0) max_gyro = std::max(max_gyro, std::fabs(r.energy.gyro_power) / scale);
    picard = std::max(picard, r.picard_iterations);
    krylov = std::max(krylov, r.krylov_iterations);
  }
  out << "steps: " << traj.steps.size() - 1 << "\n";
  out << "E(0) = " << format_double(traj.steps.front().energy.total) << "\n";
  out << "E(end) = " << format_double(traj.steps.back().energy.total) << "\n";
  out << "max balance residual = " << format_double(max_res) << "\n";
  out << "max |gyro_power| / (||curl u_t|| ||nu_t||^2) = " << format_double(max_gyro) << "\n";
  out << "max picard iterations per step = " << picard << "\n";
  out << "max krylov iterations per step = " << krylov << "\n";
  out << "a priori bound: cbar = " << format_double(bound.cbar) << ", max ratio = " << format_double(bound.max_ratio)
      << (bound.exceeded ? " (EXCEEDED)" : "") << (bound.admissible ? "" : " (parameters not theorem-admissible)")
      << "\n";
}

}  // namespace

int simulate(const RunConfig& cfg, const std::filesystem::path& out_dir, bool override_gate, std::ostream& log)
{
  std::ostringstream run_log;
  auto flush = [&] { write_file(out_dir / "run.log", run_log.str()); };
  try {
    write_file(out_dir / "config.txt", emit_config(cfg));
    const DerivedCoefficients c = derive_coefficients(cfg.material);
    log_coefficients(run_log, c);

    GridPtr grid = build_grid(cfg);
    const FieldState s0 = build_initial_state(cfg, grid);
    const GateReport gate = evaluate_gate(cfg, *grid, s0);
    log_gate(run_log, gate, cfg.gate);
    if (!gate.pass) {
      if (!override_gate) {
        run_log << "refusing to run: gate failed\n";
        flush();
        log << run_log.str();
        return kExitGate;
      }
      run_log << "gate overridden\n";
    }

    try {
      if (cfg.study == Study::mms) {
        MmsConfig mc;
        mc.dim = cfg.dim;
        mc.levels = cfg.mms_levels;
        mc.extent = cfg.extent[0];
        mc.t_end = cfg.mms_t_end;
        mc.dt_over_h = cfg.mms_dt_over_h;
        mc.solver = cfg.solver;
        mc.model = cfg.model;
        const std::array<double, 3> ext{mc.extent, mc.extent, mc.extent};
        const MmsTable t = mms_convergence(cfg.material, sine_bump_solution(cfg.material, cfg.dim, ext), mc);
        write_file(out_dir / "mms.csv", to_text([&](std::ostream& o) { write_mms_table(t, o); }));
        run_log << "mms order u = " << format_double(t.order_u) << "\n";
        run_log << "mms order nu = " << format_double(t.order_nu) << "\n";
        flush();
        log << run_log.str();
        return kExitOk;
      }

      const Trajectory traj = run(grid, cfg.material, s0, cfg.solver, cfg.model);
      for (const std::string& w : traj.warnings) run_log << "warning: " << w << "\n";
      write_file(out_dir / "timeseries.csv", to_text([&](std::ostream& o) { write_timeseries(traj, o); }));
      const BoundReport bound = apriori_bound_monitor(traj, cfg.material, c);
      write_file(out_dir / "bound.csv", to_text([&](std::ostream& o) { write_bound_table(traj, bound, o); }));
      if (cfg.write_snapshots)
        for (std::size_t i = 0; i < traj.states.size(); ++i)
          write_file(out_dir / "snapshots" / snapshot_name(traj.recorded_steps[i]),
                     to_text([&](std::ostream& o) { write_snapshot(traj.states[i], o); }));
      summarize_trajectory(run_log, traj, bound);

      if (cfg.study == Study::viscosity_ladder) {
        const ConvergenceTable t = viscosity_continuation(grid, cfg.material, s0, cfg.solver, cfg.ladder, cfg.model);
        write_file(out_dir / "viscosity_ladder.csv", to_text([&](std::ostream& o) { write_viscosity_table(t, o); }));
        run_log << "viscosity ladder: monotone (10% slack) = " << (t.monotone ? "yes" : "no")
                << ", strictly decreasing = " << (t.strictly_decreasing ? "yes" : "no") << "\n";
      } else if (cfg.study == Study::uniqueness) {
        const FieldState b = build_perturbed_state(cfg, grid);
        const DifferenceReport d = uniqueness_probe(grid, cfg.material, s0, b, cfg.solver);
        write_file(out_dir / "uniqueness.csv", to_text([&](std::ostream& o) { write_difference_table(d, o); }));
        run_log << "uniqueness: max residual = " << format_double(d.max_residual)
                << ", superposition error = " << format_double(d.superposition_error)
                << ", identical = " << (d.identical ? "yes" : "no") << "\n";
      }
    } catch (const NumericalFailure& e) {
      run_log << "numerical failure at step " << e.step() << ": " << e.what() << "\n";
      if (!e.history().empty()) {
        run_log << "residual history:";
        for (double h : e.history()) run_log << ' ' << format_double(h);
        run_log << "\n";
      }
      flush();
      log << run_log.str();
      return kExitNumerical;
    }
    flush();
    log << run_log.str();
    return kExitOk;
  } catch (const IoError& e) {
    log << "I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::filesystem::filesystem_error& e) {
    log << "I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::runtime_error& e) {
    // Unreadable profile files and similar input problems.
    log << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    log << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  }
}

namespace {

// Loads and parses; returns an exit code when that fails.
std::optional<int> load(const std::string& text, const RunOptions& opts, RunConfig& cfg, std::ostream& log)
{
  try {
    cfg = parse_config(text, opts.overrides);
  } catch (const ConfigError& e) {
    log << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  }
  return std::nullopt;
}

}  // namespace

int simulate_file(const std::filesystem::path& config_path, const RunOptions& opts, std::ostream& log)
{
  std::string text;
  try {
    text = read_file(config_path);
  } catch (const IoError& e) {
    log << "I/O error: " << e.what() << "\n";
    return kExitIo;
  }
  RunConfig cfg;
  if (auto code = load(text, opts, cfg, log)) return *code;
  const auto dir = opts.out_dir ? *opts.out_dir : resolve_output_dir(cfg.output_directory);
  return simulate(cfg, dir, opts.override_gate, log);
}

int validate_file(const std::filesystem::path& config_path, const RunOptions& opts, std::ostream& log)
{
  std::string text;
  try {
    text = read_file(config_path);
  } catch (const IoError& e) {
    log << "I/O error: " << e.what() << "\n";
    return kExitIo;
  }
  RunConfig cfg;
  if (auto code = load(text, opts, cfg, log)) return *code;
  try {
    log_coefficients(log, derive_coefficients(cfg.material));
    GridPtr grid = build_grid(cfg);
    const FieldState s0 = build_initial_state(cfg, grid);
    const GateReport gate = evaluate_gate(cfg, *grid, s0);
    log_gate(log, gate, cfg.gate);
    return gate.pass ? kExitOk : kExitGate;
  } catch (const std::exception& e) {
    log << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  }
}

namespace {

constexpr const char* kCoupledMaterial = R"(material.lambda = 1
material.mu = 2
material.k0 = 0.5
material.k1 = 2
material.k2 = 1
material.k2p = 0.3
material.k3 = 0.1
material.k3p = 0.4
material.rho = 1
material.varsigma = 1
)";

// Decoupled material (kappa = xibar = 0) for the single-field oracles.
constexpr const char* kDecoupledMaterial = R"(material.lambda = 1
material.mu = 1
material.k0 = 0.5
material.k1 = 1
material.k2 = 0.5
material.k2p = 0.2
material.k3 = 0
material.k3p = 0
material.rho = 1
material.varsigma = 1
)";

constexpr const char* kCoupledData = R"(initial.u0 = mode(1,1,0,0.02,0.01,0) + mode(2,1,0,0,0.01,0.005)
initial.dot_u0 = mode(1,2,0,0,0.05,0)
initial.nu0 = mode(1,1,0,0.2,0,0.1) + mode(3,2,0,0,0.05,0)
)";

const std::map<std::string, std::string>& presets()
{
  static const std::map<std::string, std::string> p = {
      {"decoupled_diffusion", std::string("# Out-of-plane phason mode relaxing with no elastic coupling.\n") +
                                  kDecoupledMaterial + R"(grid.dim = 2
grid.n = 15
grid.extent = 1
initial.nu0 = mode(1,1,0,0,0,1)
solver.dt = 0.01
solver.t_end = 1
solver.record_every = 10
solver.linear_solver = dense
run.model = linear
run.gate = energy
output.directory = decoupled_diffusion
)"},
      {"single_mode_wave", std::string("# Antiplane shear eigenmode; conserves energy.\n") + kDecoupledMaterial +
                               R"(grid.dim = 2
grid.n = 15
grid.extent = 1
initial.u0 = mode(1,1,0,0,0,0.1)
solver.dt = 0.01
solver.t_end = 2
solver.record_every = 20
solver.linear_solver = dense
run.model = linear
run.gate = energy
output.directory = single_mode_wave
)"},
      {"coupled_linear", std::string("# Fully coupled linear system on a 17x17 grid, 500 steps.\n") + kCoupledMaterial +
                             R"(grid.dim = 2
grid.n = 17
grid.extent = 1
)" + kCoupledData + R"(solver.dt = 0.01
solver.t_end = 5
solver.record_every = 50
solver.krylov_tol = 1e-13
run.model = linear
output.directory = coupled_linear
)"},
      {"gyro_smallness", std::string("# Gyroscopic model, ell = 1, initial rate below the smallness threshold.\n") +
                             kCoupledMaterial + R"(material.ell = 1
grid.dim = 2
grid.n = 17
grid.extent = 1
)" + kCoupledData + R"(solver.dt = 0.01
solver.t_end = 2
solver.record_every = 20
solver.krylov_tol = 1e-13
solver.picard_tol = 1e-12
run.model = gyro
output.directory = gyro_smallness
)"},
      {"viscosity_ladder", std::string("# Vanishing-viscosity continuation against the inviscid run.\n") +
                               kCoupledMaterial + R"(grid.dim = 2
grid.n = 15
grid.extent = 1
)" + kCoupledData + R"(solver.dt = 0.01
solver.t_end = 1
solver.record_every = 10
solver.krylov_tol = 1e-13
run.model = linear
run.study = viscosity_ladder
study.ladder = 0.1:0.1,0.05:0.05,0.025:0.025
output.directory = viscosity_ladder
)"},
      {"mms_ladder", std::string("# Manufactured sine-bump solution on h = 1/8, 1/16, 1/32.\n") + kCoupledMaterial +
                         R"(grid.dim = 2
grid.n = 7
grid.extent = 1
solver.dt = 0.01
solver.t_end = 0
solver.krylov_tol = 1e-13
run.model = linear
run.study = mms
study.levels = 7,15,31
study.mms_t_end = 0.5
study.dt_over_h = 0.5
output.directory = mms_ladder
)"},
  };
  return p;
}

}  // namespace

const std::vector<std::string>& scenario_names()
{
  static const std::vector<std::string> names = {"decoupled_diffusion", "single_mode_wave", "coupled_linear",
                                                 "gyro_smallness",      "viscosity_ladder", "mms_ladder"};
  return names;
}

std::optional<std::string> scenario_config_text(const std::string& name)
{
  const auto& p = presets();
  const auto it = p.find(name);
  if (it == p.end()) return std::nullopt;
  return it->second;
}

int run_scenario(const std::string& name, const RunOptions& opts, std::ostream& log)
{
  const auto text = scenario_config_text(name);
  if (!text) {
    log << "unknown scenario '" << name << "'; known:";
    for (const auto& n : scenario_names()) log << ' ' << n;
    log << "\n";
    return kExitConfig;
  }
  RunConfig cfg;
  if (auto code = load(*text, opts, cfg, log)) return *code;
  const auto dir = opts.out_dir ? *opts.out_dir : resolve_output_dir(cfg.output_directory);
  return simulate(cfg, dir, opts.override_gate, log);
}

}  // namespace qcsim
