#include "qcsim/diagnostics.hpp"

#include <cmath>
#include <future>
#include <limits>
#include <stdexcept>

#include "qcsim/grid_ops.hpp"

namespace qcsim {

BalanceSeries energy_balance_residual(const Trajectory& traj)
{
  BalanceSeries out;
  for (std::size_t n = 1; n < traj.steps.size(); ++n) {
    const StepRecord& prev = traj.steps[n - 1];
    const StepRecord& cur = traj.steps[n];
    const double r = std::fabs(cur.energy.total - prev.energy.total + cur.energy.dissipated_step - cur.forcing_work) /
                     std::max(std::fabs(prev.energy.total), 1.0);
    out.residuals.push_back(r);
    out.max_residual = std::max(out.max_residual, r);
  }
  return out;
}

BoundReport apriori_bound_monitor(const Trajectory& traj, const MaterialParams& p, const DerivedCoefficients& c)
{
  BoundReport rep;
  rep.admissible = check_admissibility(p, AdmissibilityMode::theorem_linear).pass;
  if (traj.steps.empty()) return rep;

  // Squared norms are recovered from the itemized energy (coefficient > 0) or
  // from the initial state directly.
  const FieldState& s0 = traj.states.front();
  const EdgeGradient gu = edge_gradient(s0.u), gn = edge_gradient(s0.nu);
  const CellField du = cell_divergence(s0.u), dn = cell_divergence(s0.nu);
  rep.cbar = p.rho * inner(s0.ut, s0.ut) + c.kappa0 * inner(s0.nu, s0.nu) +
             (p.mu + std::fabs(c.kappa)) * inner(gu, gu) + (c.zeta + std::fabs(c.kappa)) * inner(gn, gn) +
             (c.xi + std::fabs(c.xibar)) * inner(du, du) + (c.gamma + std::fabs(c.xibar)) * inner(dn, dn);
  rep.twice_initial_energy = 2.0 * traj.steps.front().energy.total;

  double integral = 0.0;  // 2 varsigma int ||nu_t||^2 + int (eps ||grad u_t||^2 + delta ||grad nu_t||^2)
  for (std::size_t n = 0; n < traj.steps.size(); ++n) {
    const StepRecord& r = traj.steps[n];
    if (n > 0) integral += 2.0 * r.diss_phason + r.diss_u + r.diss_nu;
    const EnergyReport& e = r.energy;
    const double lhs = 2.0 * e.kinetic + integral + 2.0 * e.phason_potential + e.grad_u + e.grad_nu;
    rep.lhs.push_back(lhs);
    double ratio = 0.0;
    if (rep.cbar > 0.0)
      ratio = lhs / rep.cbar;
    else if (lhs != 0.0)
      ratio = std::numeric_limits<double>::infinity();
    rep.ratio.push_back(ratio);
    rep.max_ratio = std::max(rep.max_ratio, ratio);
  }
  rep.exceeded = rep.max_ratio > 1.0;
  return rep;
}

namespace {

struct TimeL2 {
  double u = 0.0;
  double nu = 0.0;
};

TimeL2 time_l2_difference(const Trajectory& a, const Trajectory& b, double dt)
{
  if (a.states.size() != b.states.size()) throw std::logic_error("trajectories of different length");
  TimeL2 d;
  for (std::size_t n = 1; n < a.states.size(); ++n) {
    const double eu = norm_l2(a.states[n].u - b.states[n].u);
    const double en = norm_l2(a.states[n].nu - b.states[n].nu);
    d.u += dt * eu * eu;
    d.nu += dt * en * en;
  }
  d.u = std::sqrt(d.u);
  d.nu = std::sqrt(d.nu);
  return d;
}

}  // namespace

ConvergenceTable viscosity_continuation(GridPtr grid, const MaterialParams& p, const FieldState& s0,
                                        const SolverConfig& cfg, const std::vector<std::pair<double, double>>& ladder,
                                        Model model)
{
  if (ladder.empty()) throw std::invalid_argument("viscosity ladder is empty");
  SolverConfig every_step = cfg;
  every_step.record_every = 1;

  const bool zero_baseline = model == Model::linear || p.ell == 0.0;
  std::vector<std::pair<double, double>> runs = ladder;
  ConvergenceTable table;
  if (zero_baseline) {
    runs.emplace_back(0.0, 0.0);
  } else {
    table.ref_eps = ladder.back().first;
    table.ref_delta = ladder.back().second;
  }

  std::vector<std::future<Trajectory>> jobs;
  for (const auto& [eps, delta] : runs) {
    MaterialParams q = p;
    q.eps_visc = eps;
    q.delta_visc = delta;
    jobs.push_back(std::async(std::launch::async, [=] { return run(grid, q, s0, every_step, model); }));
  }
  std::vector<Trajectory> trajs;
  for (auto& j : jobs) trajs.push_back(j.get());

  const Trajectory& ref = trajs.back();
  const std::size_t rows = trajs.size() - 1;
  for (std::size_t k = 0; k < rows; ++k) {
    const TimeL2 d = time_l2_difference(trajs[k], ref, cfg.dt);
    table.rungs.push_back({runs[k].first, runs[k].second, d.u, d.nu});
  }
  for (std::size_t k = 1; k < table.rungs.size(); ++k) {
    const ViscosityRung& a = table.rungs[k - 1];
    const ViscosityRung& b = table.rungs[k];
    if (b.diff_u > 1.1 * a.diff_u || b.diff_nu > 1.1 * a.diff_nu) table.monotone = false;
    if (!(b.diff_u < a.diff_u) || !(b.diff_nu < a.diff_nu)) table.strictly_decreasing = false;
  }
  return table;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y)
{
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) throw std::invalid_argument("slope needs at least two matching points");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

MmsTable mms_convergence(const MaterialParams& p, const ManufacturedSolution& m, const MmsConfig& cfg)
{
  if (cfg.levels.empty()) throw std::invalid_argument("MMS ladder is empty");
  if (!(cfg.t_end > 0.0) || !(cfg.dt_over_h > 0.0)) throw std::invalid_argument("MMS needs t_end > 0 and dt_over_h > 0");

  MmsTable table;
  std::vector<double> hs, eu, en;
  for (int n : cfg.levels) {
    const Index3 nn{n, n, cfg.dim == 3 ? n : 1};
    const std::array<double, 3> ext{cfg.extent, cfg.extent, cfg.dim == 3 ? cfg.extent : 1.0};
    auto probe = std::make_shared<Grid>(cfg.dim, nn, ext);

    // Smoothness and boundary checks on the node set.
    const double probe_times[] = {0.0, 0.5 * cfg.t_end, cfg.t_end};
    probe->for_each_node([&](std::size_t, const Index3& q) {
      const Vec3 x = probe->coord(q);
      for (double t : probe_times) {
        const Vec3 vals[] = {m.u(x, t), m.ut(x, t), m.nu(x, t), m.force_u(x, t), m.force_nu(x, t)};
        for (const Vec3& v : vals)
          for (double c : v)
            if (!std::isfinite(c)) throw std::invalid_argument("manufactured solution is not finite on the grid");
      }
      if (probe->is_boundary(q)) {
        for (double t : probe_times) {
          const Vec3 du = m.u(x, t) - m.u(x, 0.0), dn = m.nu(x, t) - m.nu(x, 0.0);
          if (norm(du) > 1e-13 * (1.0 + norm(m.u(x, 0.0))) || norm(dn) > 1e-13 * (1.0 + norm(m.nu(x, 0.0))) ||
              norm(m.ut(x, t)) > 1e-13)
            throw std::invalid_argument("manufactured boundary values must be time independent");
        }
      }
    });

    GridPtr grid = make_grid(
        cfg.dim, nn, ext, [&](const Vec3& x) { return m.u(x, 0.0); }, [&](const Vec3& x) { return m.nu(x, 0.0); });
    const double h = grid->h()[0];
    const int steps = static_cast<int>(std::ceil(cfg.t_end / (cfg.dt_over_h * h) - 1e-12));
    SolverConfig sc = cfg.solver;
    sc.dt = cfg.t_end / steps;
    sc.t_end = cfg.t_end;
    sc.record_every = steps;

    const FieldState s0 = project_initial_data(
        grid, [&](const Vec3& x) { return m.u(x, 0.0); }, [&](const Vec3& x) { return m.ut(x, 0.0); },
        [&](const Vec3& x) { return m.nu(x, 0.0); });
    const Forcing forcing = [&](double t, VectorField& fu, VectorField& fn) {
      grid->for_each_interior([&](std::size_t idx, const Index3& q) {
        const Vec3 x = grid->coord(q);
        fu[idx] = m.force_u(x, t);
        fn[idx] = m.force_nu(x, t);
      });
    };
    const Trajectory traj = run(grid, p, s0, sc, cfg.model, forcing);
    const FieldState& last = traj.states.back();

    const VectorField u_exact = VectorField::sample(grid, [&](const Vec3& x) { return m.u(x, last.t); });
    const VectorField nu_exact = VectorField::sample(grid, [&](const Vec3& x) { return m.nu(x, last.t); });
    MmsLevel lvl{n, h, sc.dt, steps, norm_l2(last.u - u_exact), norm_l2(last.nu - nu_exact)};
    table.levels.push_back(lvl);
    hs.push_back(h);
    eu.push_back(lvl.err_u);
    en.push_back(lvl.err_nu);
  }
  if (hs.size() >= 2) {
    table.order_u = loglog_slope(hs, eu);
    table.order_nu = loglog_slope(hs, en);
  } else {
    table.order_u = table.order_nu = std::numeric_limits<double>::quiet_NaN();
  }
  return table;
}

namespace {

FieldState difference(const FieldState& a, const FieldState& b)
{
  return FieldState{a.t, a.u - b.u, a.ut - b.ut, a.nu - b.nu};
}

double state_norm(const FieldState& s)
{
  return std::sqrt(inner(s.u, s.u) + inner(s.ut, s.ut) + inner(s.nu, s.nu));
}

bool bitwise_equal(const FieldState& a, const FieldState& b)
{
  return a.u.values == b.u.values && a.ut.values == b.ut.values && a.nu.values == b.nu.values;
}

double max_abs(const FieldState& s)
{
  double m = 0.0;
  for (const auto* f : {&s.u, &s.ut, &s.nu})
    for (const Vec3& v : f->values)
      for (double c : v) m = std::max(m, std::fabs(c));
  return m;
}

}  // namespace

DifferenceReport uniqueness_probe(GridPtr grid, const MaterialParams& p, const FieldState& a, const FieldState& b,
                                  const SolverConfig& cfg)
{
  if (p.ell != 0.0) throw std::invalid_argument("uniqueness probe covers the linear model only (ell = 0)");
  SolverConfig every_step = cfg;
  every_step.record_every = 1;

  // The difference solves the homogeneous problem on the same node set.
  auto homogeneous = std::make_shared<Grid>(*grid);
  homogeneous->set_boundary_data(std::vector<Vec3>(grid->boundary_nodes().size(), zero_vec()),
                                 std::vector<Vec3>(grid->boundary_nodes().size(), zero_vec()));
  FieldState d0 = difference(a, b);
  d0.u.grid = d0.ut.grid = d0.nu.grid = homogeneous;

  auto ja = std::async(std::launch::async, [&] { return run(grid, p, a, every_step, Model::linear); });
  auto jb = std::async(std::launch::async, [&] { return run(grid, p, b, every_step, Model::linear); });
  auto jd = std::async(std::launch::async, [&] { return run(homogeneous, p, d0, every_step, Model::linear); });
  const Trajectory ta = ja.get(), tb = jb.get(), td = jd.get();

  const DerivedCoefficients c = derive_coefficients(p);
  DifferenceReport rep;
  rep.identical = true;
  double max_c = 0.0, max_mismatch = 0.0;
  std::vector<FieldState> diffs;
  for (std::size_t n = 0; n < ta.states.size(); ++n) {
    FieldState d = difference(ta.states[n], tb.states[n]);
    rep.identical = rep.identical && bitwise_equal(ta.states[n], tb.states[n]);
    rep.max_difference = std::max(rep.max_difference, max_abs(d));
    rep.energy.push_back(total_energy(d, p, c).total);
    max_c = std::max(max_c, state_norm(td.states[n]));
    max_mismatch = std::max(max_mismatch, state_norm(difference(d, td.states[n])));
    diffs.push_back(std::move(d));
  }
  rep.superposition_error = max_c > 0.0 ? max_mismatch / max_c : max_mismatch;

  const double scale = rep.energy.empty() || rep.energy.front() == 0.0 ? 1.0 : std::fabs(rep.energy.front());
  for (std::size_t n = 1; n < diffs.size(); ++n) {
    VectorField w = diffs[n].ut + diffs[n - 1].ut;
    w *= 0.5;
    VectorField q = diffs[n].nu - diffs[n - 1].nu;
    q *= 1.0 / cfg.dt;
    double diss = cfg.dt * p.varsigma * inner(q, q);
    if (p.eps_visc != 0.0) {
      const EdgeGradient g = edge_gradient(w);
      diss += cfg.dt * p.eps_visc * inner(g, g);
    }
    if (p.delta_visc != 0.0) {
      const EdgeGradient g = edge_gradient(q);
      diss += cfg.dt * p.delta_visc * inner(g, g);
    }
    const double r = std::fabs(rep.energy[n] - rep.energy[n - 1] + diss) / scale;
    rep.residuals.push_back(r);
    rep.max_residual = std::max(rep.max_residual, r);
    if (rep.energy[n] > rep.energy[n - 1] + 1e-12 * scale) rep.energy_nonincreasing = false;
  }
  return rep;
}

}  // namespace qcsim
