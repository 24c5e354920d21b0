// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <Eigen/Dense>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <unistd.h>

#include "qcsim/config.hpp"
#include "qcsim/diagnostics.hpp"
#include "qcsim/grid_ops.hpp"
#include "qcsim/output.hpp"
#include "qcsim/scenario.hpp"
#include "support/oracles.hpp"

using namespace qcsim;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v) { return format_double(v); }

struct Preset {
  RunConfig cfg;
  GridPtr grid;
  FieldState s0;
};

Preset preset(const std::string& name, const std::vector<std::pair<std::string, std::string>>& overrides = {})
{
  Preset p;
  p.cfg = parse_config(*scenario_config_text(name), overrides);
  p.grid = build_grid(p.cfg);
  p.s0 = build_initial_state(p.cfg, p.grid);
  return p;
}

fs::path scratch(const std::string& tag)
{
  const fs::path dir = fs::temp_directory_path() / ("qcsim_acceptance_" + std::to_string(::getpid())) / tag;
  fs::remove_all(dir);
  return dir;
}

int run_preset(const std::string& name, const fs::path& out,
               std::vector<std::pair<std::string, std::string>> overrides = {})
{
  RunOptions o;
  o.out_dir = out;
  o.overrides = std::move(overrides);
  std::ostringstream sink;
  return run_scenario(name, o, sink);
}

// Largest ledger residual recomputed from the itemized records.
double ledger_residual(const Trajectory& t)
{
  double worst = 0.0;
  for (std::size_t n = 1; n < t.steps.size(); ++n) {
    const StepRecord& a = t.steps[n - 1];
    const StepRecord& b = t.steps[n];
    const double d = b.energy.total - a.energy.total + b.diss_phason + b.diss_u + b.diss_nu - b.forcing_work;
    worst = std::max(worst, std::fabs(d) / std::max(std::fabs(a.energy.total), 1.0));
  }
  return worst;
}

Outcome energy_identity()
{
  const Preset p = preset("coupled_linear");
  const Trajectory t = run(p.grid, p.cfg.material, p.s0, p.cfg.solver, Model::linear);
  const double lib = energy_balance_residual(t).max_residual;
  const double own = ledger_residual(t);
  const bool shape = p.grid->n()[0] == 17 && p.grid->n()[1] == 17 && t.steps.size() == 501;
  return {shape && lib <= 1e-10 && own <= 1e-10,
          "17x17, " + std::to_string(t.steps.size() - 1) + " steps, max residual " + fmt(std::max(lib, own))};
}

Outcome gyro_zero_work()
{
  const Preset p = preset("gyro_smallness");
  const Trajectory t = run(p.grid, p.cfg.material, p.s0, p.cfg.solver, Model::gyro);
  double worst_ratio = 0.0;
  bool bound = true, moved = false;
  for (std::size_t n = 1; n < t.steps.size(); ++n) {
    const StepRecord& r = t.steps[n];
    const double scale = r.curl_ut_norm * r.nut_norm * r.nut_norm;
    bound = bound && std::fabs(r.energy.gyro_power) <= 1e-14 * scale;
    if (scale > 0) worst_ratio = std::max(worst_ratio, std::fabs(r.energy.gyro_power) / scale);
    moved = moved || scale > 0;
  }
  const double res = std::max(energy_balance_residual(t).max_residual, ledger_residual(t));
  return {p.cfg.material.ell == 1.0 && moved && bound && res <= 1e-10,
          "ell = 1, max |gyro_power|/scale " + fmt(worst_ratio) + ", max residual " + fmt(res)};
}

Outcome apriori_bound()
{
  std::mt19937_64 rng(2024);
  GridPtr g = make_grid(2, {9, 9, 1}, {1, 1, 1});
  double worst = 0.0;
  bool all = true;
  for (int trial = 0; trial < 10; ++trial) {
    const MaterialParams p = oracle::random_theorem_params(rng);
    const FieldState s0 = project_initial_data(g, oracle::smooth_field(g, rng, 0.1), oracle::smooth_field(g, rng, 0.1),
                                               oracle::smooth_field(g, rng, 0.1));
    SolverConfig cfg;
    cfg.dt = 0.01;
    cfg.t_end = 2.0;
    cfg.krylov_tol = 1e-13;
    const Trajectory t = run(g, p, s0, cfg, Model::linear);
    const BoundReport b = apriori_bound_monitor(t, p, derive_coefficients(p));
    all = all && b.admissible && b.max_ratio <= 1.0 && b.cbar > 0.0;
    worst = std::max(worst, b.max_ratio);
  }
  return {all, "10 runs, 9x9, 200 steps, max ratio " + fmt(worst)};
}

Outcome smallness_gate()
{
  const Preset p = preset("gyro_smallness");
  const GateReport g = evaluate_gate(p.cfg, *p.grid, p.s0);
  // varsigma = 2 * lhs puts the data exactly on the threshold.
  const double at = 2.0 * g.gyro_lhs;
  const double above = std::nextafter(at, INFINITY);
  const double below = std::nextafter(at, 0.0);
  const std::vector<std::pair<std::string, std::string>> short_run = {{"solver.t_end", "0.05"}};
  auto with = [&](double varsigma) {
    auto o = short_run;
    o.emplace_back("material.varsigma", fmt(varsigma));
    return o;
  };
  const int code_eq = run_preset("gyro_smallness", scratch("gate_eq"), with(at));
  const int code_above = run_preset("gyro_smallness", scratch("gate_above"), with(below));
  const int code_ok = run_preset("gyro_smallness", scratch("gate_ok"), with(above));
  const int code_preset = run_preset("gyro_smallness", scratch("gate_preset"), short_run);
  return {code_eq == kExitGate && code_above == kExitGate && code_ok == kExitOk && code_preset == kExitOk,
          "ell*||u_t(0)||_{1,2} = " + fmt(g.gyro_lhs) + "; exit codes: equal " + std::to_string(code_eq) +
              ", above " + std::to_string(code_above) + ", just below " + std::to_string(code_ok) + ", preset " +
              std::to_string(code_preset)};
}

Outcome vanishing_viscosity()
{
  Preset p = preset("viscosity_ladder");
  p.cfg.material.ell = 0.0;
  const ConvergenceTable t =
      viscosity_continuation(p.grid, p.cfg.material, p.s0, p.cfg.solver, {{0.1, 0.1}, {0.05, 0.05}, {0.025, 0.025}});
  std::string d = "reference (" + fmt(t.ref_eps) + "," + fmt(t.ref_delta) + "); diffs u/nu:";
  for (const auto& r : t.rungs) d += " " + fmt(r.diff_u) + "/" + fmt(r.diff_nu);
  return {t.ref_eps == 0.0 && t.ref_delta == 0.0 && t.rungs.size() == 3 && t.strictly_decreasing && t.monotone, d};
}

Outcome uniqueness()
{
  Preset p = preset("coupled_linear", {{"grid.n", "15"}, {"solver.t_end", "1"}});
  p.cfg.solver.linear_solver = LinearSolverKind::dense;
  const DifferenceReport same = uniqueness_probe(p.grid, p.cfg.material, p.s0, p.s0, p.cfg.solver);
  FieldState b = p.s0;
  b.nu.axpy(1.0, VectorField::sample(p.grid, [](const Vec3& x) {
              return Vec3{0.01 * std::sin(std::numbers::pi * x[0]) * std::sin(std::numbers::pi * x[1]), 0, 0};
            }));
  b.nu.set_boundary(p.grid->bc_nu());
  const DifferenceReport diff = uniqueness_probe(p.grid, p.cfg.material, p.s0, b, p.cfg.solver);
  return {same.identical && same.max_difference == 0.0 && diff.superposition_error <= 1e-12,
          "identical max difference " + fmt(same.max_difference) + ", superposition error " +
              fmt(diff.superposition_error)};
}

Eigen::MatrixXd library_matrix(GridPtr g, const LinearMap& m)
{
  const Eigen::Index n = static_cast<Eigen::Index>(3 * g->interior_count());
  Eigen::MatrixXd a(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
    e[j] = 1.0;
    a.col(j) = oracle::to_dofs(m.apply_homogeneous(oracle::from_dofs(g, e)));
  }
  return a;
}

double rel_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b)
{
  return (a - b).cwiseAbs().maxCoeff() / std::max(b.cwiseAbs().maxCoeff(), 1.0);
}

VectorField mode_field(GridPtr g, const Eigen::VectorXd& phi, int component, double amplitude)
{
  Eigen::VectorXd x = Eigen::VectorXd::Zero(3 * phi.size());
  x.segment(component * phi.size(), phi.size()) = amplitude * phi;
  return oracle::from_dofs(g, x);
}

Outcome oracle_equivalence()
{
  GridPtr g = make_grid(2, {5, 5, 1}, {1, 1, 1});
  std::mt19937_64 rng(7);
  double assembly = 0.0, symmetry = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    const MaterialParams p = oracle::random_energy_params(rng);
    const auto c = derive_coefficients(p);
    const auto ops = assemble_operators(g, c, p);
    const std::pair<const LinearMap*, Eigen::MatrixXd> maps[] = {
        {&ops.L_uu, oracle::combination(*g, p.mu, c.xi, 0)},
        {&ops.L_cross, oracle::combination(*g, c.kappa, c.xibar, 0)},
        {&ops.L_nn, oracle::combination(*g, c.zeta, c.gamma, -c.kappa0)},
        {&ops.R_u, oracle::combination(*g, p.eps_visc, 0, 0)},
        {&ops.R_n, oracle::combination(*g, p.delta_visc, 0, 0)},
    };
    for (const auto& [map, dense] : maps) {
      const Eigen::MatrixXd lib = library_matrix(g, *map);
      assembly = std::max(assembly, rel_diff(lib, dense));
      symmetry = std::max(symmetry, rel_diff(lib, lib.transpose()));
    }
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(-oracle::scalar_laplacian(*g));
  SolverConfig cfg;
  cfg.linear_solver = LinearSolverKind::dense;

  // Phason decay: kappa = xibar = gamma = 0.
  double decay = 0.0;
  {
    MaterialParams p;
    p.mu = 1;
    p.k2 = 0.6;
    p.k2p = 0.6;
    p.k0 = 0.3;
    p.varsigma = 1.5;
    const auto c = derive_coefficients(p);
    const double lam = es.eigenvalues()[3];
    const Eigen::VectorXd phi = es.eigenvectors().col(3);
    cfg.dt = 0.05;
    cfg.t_end = 2.0;
    const double a = (c.zeta * lam + c.kappa0) / p.varsigma;
    const double r = (1 - 0.5 * a * cfg.dt) / (1 + 0.5 * a * cfg.dt);
    const FieldState s0 = project_initial_data(g, VectorField(g), VectorField(g), mode_field(g, phi, 1, 1.0));
    const Trajectory t = run(g, p, s0, cfg, Model::linear);
    double amp = 1.0;
    for (std::size_t n = 1; n < t.states.size(); ++n) {
      amp *= r;
      const Eigen::VectorXd err = oracle::to_dofs(t.states[n].nu) - oracle::to_dofs(mode_field(g, phi, 1, amp));
      decay = std::max({decay, err.cwiseAbs().maxCoeff(), oracle::max_abs(t.states[n].u)});
    }
  }

  // Shear wave: xi = 0, uncoupled.
  double wave = 0.0;
  {
    MaterialParams p;
    p.mu = 1.3;
    p.lambda = -1.3;
    p.k1 = 1;
    p.k2 = 0.5;
    p.k2p = 0.2;
    p.k0 = 0.4;
    p.rho = 0.8;
    const double lam = es.eigenvalues()[4];
    const Eigen::VectorXd phi = es.eigenvectors().col(4);
    const double omega2 = p.mu * lam / p.rho;
    cfg.dt = 0.05;
    cfg.t_end = 5.0;
    Eigen::Matrix2d m;
    m << 0, 1, -omega2, 0;
    const Eigen::Matrix2d step =
        (Eigen::Matrix2d::Identity() - 0.5 * cfg.dt * m).inverse() * (Eigen::Matrix2d::Identity() + 0.5 * cfg.dt * m);
    const FieldState s0 = project_initial_data(g, mode_field(g, phi, 0, 0.3), VectorField(g), VectorField(g));
    const Trajectory t = run(g, p, s0, cfg, Model::linear);
    Eigen::Vector2d y(0.3, 0.0);
    for (std::size_t n = 1; n < t.states.size(); ++n) {
      y = step * y;
      const Eigen::VectorXd eu = oracle::to_dofs(t.states[n].u) - oracle::to_dofs(mode_field(g, phi, 0, y[0]));
      const Eigen::VectorXd ev = oracle::to_dofs(t.states[n].ut) - oracle::to_dofs(mode_field(g, phi, 0, y[1]));
      wave = std::max({wave, eu.cwiseAbs().maxCoeff(), ev.cwiseAbs().maxCoeff() / std::sqrt(omega2)});
    }
  }
  return {assembly <= 1e-12 && symmetry <= 1e-12 && decay <= 1e-10 && wave <= 1e-10,
          "5x5 assembly " + fmt(assembly) + ", symmetry " + fmt(symmetry) + ", decay " + fmt(decay) + ", wave " +
              fmt(wave)};
}

double mat_norm(const Mat3& a) { return std::sqrt(ddot(a, a)); }

Outcome constitutive_gradients()
{
  std::mt19937_64 rng(8);
  const double h = 1e-6;
  double worst = 0.0;
  for (int sample = 0; sample < 100; ++sample) {
    const MaterialParams p = oracle::random_energy_params(rng);
    SmallStrainInputs s;
    s.eps_strain = sym(oracle::random_mat(rng));
    s.N = oracle::random_mat(rng);
    s.nu = oracle::random_vec(rng);
    const Mat3 sigma = stress_sigma(p, s);
    const Mat3 sa = phason_stress(p, s);
    const Vec3 z = p.k0 * s.nu;
    Mat3 fd_sigma = zero_mat(), fd_sa = zero_mat();
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        Mat3 e = zero_mat();
        e[i][j] += 0.5;
        e[j][i] += 0.5;
        SmallStrainInputs a = s, b = s;
        a.eps_strain = s.eps_strain + h * e;
        b.eps_strain = s.eps_strain - h * e;
        fd_sigma[i][j] = (energy_density(p, a) - energy_density(p, b)) / (2 * h);
        SmallStrainInputs c = s, d = s;
        c.N[i][j] += h;
        d.N[i][j] -= h;
        fd_sa[i][j] = (energy_density(p, c) - energy_density(p, d)) / (2 * h);
      }
    Vec3 fd_z = zero_vec();
    for (int i = 0; i < 3; ++i) {
      SmallStrainInputs a = s, b = s;
      a.nu[i] += h;
      b.nu[i] -= h;
      fd_z[i] = (energy_density(p, a) - energy_density(p, b)) / (2 * h);
    }
    worst = std::max({worst, mat_norm(fd_sigma - sigma) / std::max(mat_norm(sigma), 1e-300),
                      mat_norm(fd_sa - sa) / std::max(mat_norm(sa), 1e-300), norm(fd_z - z) / std::max(norm(z), 1.0)});
  }
  return {worst <= 1e-6, "100 samples, worst relative error " + fmt(worst)};
}

Outcome mms_order()
{
  const RunConfig c = parse_config(*scenario_config_text("mms_ladder"));
  MmsConfig mc;
  mc.dim = c.dim;
  mc.levels = c.mms_levels;
  mc.extent = c.extent[0];
  mc.t_end = c.mms_t_end;
  mc.dt_over_h = c.mms_dt_over_h;
  mc.solver = c.solver;
  const MmsTable t = mms_convergence(c.material, sine_bump_solution(c.material, c.dim, {1, 1, 1}), mc);
  const bool ok = t.levels.size() == 3 && std::fabs(t.order_u - 2.0) <= 0.3 && std::fabs(t.order_nu - 2.0) <= 0.3;
  return {ok, "orders u " + fmt(t.order_u) + ", nu " + fmt(t.order_nu)};
}

std::map<std::string, std::string> bundle(const fs::path& dir)
{
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file()) files[fs::relative(e.path(), dir).string()] = read_file(e.path());
  return files;
}

Outcome determinism()
{
  bool ok = true;
  std::size_t files = 0;
  std::string bad;
  for (const std::string& name : scenario_names()) {
    const fs::path a = scratch(name + "_a"), b = scratch(name + "_b");
    const int ca = run_preset(name, a), cb = run_preset(name, b);
    const auto fa = bundle(a), fb = bundle(b);
    const bool same = ca == kExitOk && cb == kExitOk && !fa.empty() && fa == fb;
    if (!same) bad += " " + name;
    ok = ok && same;
    files += fa.size();
  }
  return {ok, std::to_string(scenario_names().size()) + " scenarios, " + std::to_string(files) + " files" +
                  (bad.empty() ? std::string() : ", differing:" + bad)};
}

}  // namespace

int main()
{
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"energy identity closure", energy_identity},
      {"gyroscopic zero work", gyro_zero_work},
      {"a priori bound", apriori_bound},
      {"smallness gate", smallness_gate},
      {"vanishing viscosity", vanishing_viscosity},
      {"uniqueness probe", uniqueness},
      {"oracle equivalence", oracle_equivalence},
      {"constitutive gradients", constitutive_gradients},
      {"MMS spatial order", mms_order},
      {"determinism", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::ostringstream line;
    line.precision(2);
    line << std::fixed << "AC" << i + 1 << " " << criteria[i].first << ": " << (o.pass ? "PASS" : "FAIL") << " ("
         << o.detail << "; " << secs << " s)";
    std::cout << line.str() << std::endl;
    failed += !o.pass;
  }
  fs::remove_all(fs::temp_directory_path() / ("qcsim_acceptance_" + std::to_string(::getpid())));
  std::cout << (failed ? "acceptance: FAIL (" + std::to_string(failed) + " criteria)" : std::string("acceptance: PASS"))
            << std::endl;
  return failed ? 1 : 0;
}
