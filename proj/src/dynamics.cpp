#include "qcsim/dynamics.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

#include "qcsim/grid_ops.hpp"
#include "qcsim/krylov.hpp"

namespace qcsim {

VectorField LinearMap::apply(const VectorField& f) const
{
  VectorField out(f.grid);
  if (laplacian != 0.0) out.axpy(laplacian, vec_laplacian(f));
  if (grad_div != 0.0) out.axpy(grad_div, ::qcsim::grad_div(f));
  if (identity != 0.0) {
    f.grid->for_each_interior([&](std::size_t idx, const Index3&) {
      for (int c = 0; c < 3; ++c) out.values[idx][c] += identity * f.values[idx][c];
    });
  }
  return out;
}

VectorField LinearMap::apply_homogeneous(const VectorField& f) const
{
  VectorField g = f;
  g.zero_boundary();
  return apply(g);
}

namespace {

VectorField boundary_only(const GridPtr& g, const std::vector<Vec3>& data)
{
  VectorField f(g);
  f.set_boundary(data);
  return f;
}

}  // namespace

DiscreteOperators assemble_operators(GridPtr grid, const DerivedCoefficients& c, const MaterialParams& p)
{
  DiscreteOperators ops;
  ops.grid = grid;
  ops.L_uu = {p.mu, c.xi, 0.0};
  ops.L_cross = {c.kappa, c.xibar, 0.0};
  ops.L_nn = {c.zeta, c.gamma, -c.kappa0};
  ops.R_u = {p.eps_visc, 0.0, 0.0};
  ops.R_n = {p.delta_visc, 0.0, 0.0};

  const VectorField ub = boundary_only(grid, grid->bc_u());
  const VectorField nb = boundary_only(grid, grid->bc_nu());
  ops.offset_uu = ops.L_uu.apply(ub);
  ops.offset_cross_u = ops.L_cross.apply(ub);
  ops.offset_cross_nu = ops.L_cross.apply(nb);
  ops.offset_nn = ops.L_nn.apply(nb);
  return ops;
}

GateReport check_theorem_hypotheses(const MaterialParams& p, const Grid& grid, const FieldState& s0, Model mode)
{
  (void)grid;
  GateReport r;
  r.material = check_admissibility(
      p, mode == Model::gyro ? AdmissibilityMode::theorem_gyro : AdmissibilityMode::theorem_linear);
  for (const auto& v : r.material.violations) r.failures.push_back(v.name);

  r.h1_u0 = norm_h1(s0.u);
  r.l2_ut0 = norm_l2(s0.ut);
  r.h1_nu0 = norm_h1(s0.nu);
  r.norms_finite = std::isfinite(r.h1_u0) && std::isfinite(r.l2_ut0) && std::isfinite(r.h1_nu0);
  if (!r.norms_finite) r.failures.push_back("finite initial norms");

  if (mode == Model::gyro) {
    r.gyro_checked = true;
    r.gyro_lhs = p.ell * norm_h1(s0.ut);
    r.gyro_rhs = 0.5 * p.varsigma;
    if (!(r.gyro_lhs < r.gyro_rhs)) r.failures.push_back("ell*||u_t(0)||_{1,2}<varsigma/2");
  }
  r.pass = r.failures.empty();
  return r;
}

namespace {

FieldState pin_boundary(FieldState s)
{
  const Grid& g = *s.u.grid;
  s.u.set_boundary(g.bc_u());
  s.nu.set_boundary(g.bc_nu());
  s.ut.zero_boundary();
  return s;
}

}  // namespace

FieldState project_initial_data(GridPtr grid, const FieldFunction& u0, const FieldFunction& dot_u0,
                                const FieldFunction& nu0)
{
  auto sample = [&](const FieldFunction& f) { return f ? VectorField::sample(grid, f) : VectorField(grid); };
  FieldState s{0.0, sample(u0), sample(dot_u0), sample(nu0)};
  return pin_boundary(std::move(s));
}

FieldState project_initial_data(GridPtr grid, const VectorField& u0, const VectorField& dot_u0,
                                const VectorField& nu0)
{
  for (const VectorField* f : {&u0, &dot_u0, &nu0}) {
    require_same_grid(grid, f->grid);
    if (f->values.size() != grid->node_count()) throw GridMismatch("tabulated field does not match the grid");
  }
  FieldState s{0.0, u0, dot_u0, nu0};
  s.u.grid = s.ut.grid = s.nu.grid = grid;
  return pin_boundary(std::move(s));
}

double accuracy_dt_guard(const Grid& grid, const MaterialParams& p)
{
  double hmin = std::numeric_limits<double>::infinity();
  for (int a = 0; a < grid.dim(); ++a) hmin = std::min(hmin, grid.h()[a]);
  const double speed2 = (p.mu + p.lambda + p.mu) / p.rho;
  if (!(speed2 > 0.0)) return std::numeric_limits<double>::infinity();
  return hmin / std::sqrt(speed2);
}

// ---------------------------------------------------------------------------

struct Stepper::Impl {
  DiscreteOperators ops;
  MaterialParams p;
  SolverConfig cfg;
  Model model;
  GridPtr grid;
  std::size_t nn;  // 3 * node_count
  double c1, c2;   // dt/2, dt^2/4
  double su, sn;   // symmetric diagonal scaling of the two blocks
  std::vector<std::size_t> dofs;  // interior dofs of the packed vector (dense path)
  std::optional<Eigen::PartialPivLU<Eigen::MatrixXd>> lu;

  Impl(const DiscreteOperators& o, const MaterialParams& pp, const SolverConfig& c, Model m)
      : ops(o), p(pp), cfg(c), model(m), grid(o.grid)
  {
    if (!(cfg.dt > 0.0)) throw std::invalid_argument("dt must be positive");
    if (!(cfg.krylov_tol > 0.0) || !(cfg.picard_tol > 0.0)) throw std::invalid_argument("tolerances must be positive");
    nn = 3 * grid->node_count();
    c1 = 0.5 * cfg.dt;
    c2 = 0.25 * cfg.dt * cfg.dt;
    double lap = 0.0;
    for (int a = 0; a < grid->dim(); ++a) lap += 2.0 / (grid->h()[a] * grid->h()[a]);
    const double du = std::fabs(p.rho) + c2 * (std::fabs(ops.L_uu.laplacian) + std::fabs(ops.L_uu.grad_div)) * lap +
                      c1 * std::fabs(ops.R_u.laplacian) * lap;
    const double dn = c1 * (std::fabs(p.varsigma) + std::fabs(ops.R_n.laplacian) * lap) +
                      c2 * ((std::fabs(ops.L_nn.laplacian) + std::fabs(ops.L_nn.grad_div)) * lap +
                            std::fabs(ops.L_nn.identity));
    su = du > 0.0 ? 1.0 / std::sqrt(du) : 1.0;
    sn = dn > 0.0 ? 1.0 / std::sqrt(dn) : 1.0;

    if (cfg.linear_solver == LinearSolverKind::dense) build_dense();
  }

  void unpack(const std::vector<double>& x, VectorField& w, VectorField& q) const
  {
    for (std::size_t i = 0; i < grid->node_count(); ++i)
      for (int c = 0; c < 3; ++c) {
        w.values[i][c] = x[3 * i + c];
        q.values[i][c] = x[nn + 3 * i + c];
      }
  }

  void pack(const VectorField& w, const VectorField& q, std::vector<double>& x) const
  {
    x.resize(2 * nn);
    for (std::size_t i = 0; i < grid->node_count(); ++i)
      for (int c = 0; c < 3; ++c) {
        x[3 * i + c] = w.values[i][c];
        x[nn + 3 * i + c] = q.values[i][c];
      }
  }

  static void combine(VectorField& out, const LinearMap& m, const VectorField& lap, const VectorField& gd,
                      const VectorField& f, double scale)
  {
    f.grid->for_each_interior([&](std::size_t idx, const Index3&) {
      for (int c = 0; c < 3; ++c)
        out.values[idx][c] +=
            scale * (m.laplacian * lap.values[idx][c] + m.grad_div * gd.values[idx][c] + m.identity * f.values[idx][c]);
    });
  }

  // Unscaled block operator on zero-boundary (w, q).
  void block_apply(const VectorField& w, const VectorField& q, VectorField& aw, VectorField& aq) const
  {
    const VectorField lw = vec_laplacian(w);
    const VectorField gw = grad_div(w);
    const VectorField lq = vec_laplacian(q);
    const VectorField gq = grad_div(q);
    aw = VectorField(grid);
    aq = VectorField(grid);
    grid->for_each_interior([&](std::size_t idx, const Index3&) {
      aw.values[idx] = p.rho * w.values[idx];
      aq.values[idx] = (c1 * p.varsigma) * q.values[idx];
    });
    combine(aw, ops.L_uu, lw, gw, w, -c2);
    combine(aw, ops.R_u, lw, gw, w, -c1);
    combine(aw, ops.L_cross, lq, gq, q, -c2);
    combine(aq, ops.R_n, lq, gq, q, -c1);
    combine(aq, ops.L_nn, lq, gq, q, -c2);
    combine(aq, ops.L_cross, lw, gw, w, -c2);
  }

  void scaled_apply(const std::vector<double>& x, std::vector<double>& y) const
  {
    VectorField w(grid), q(grid), aw, aq;
    unpack(x, w, q);
    w *= su;
    q *= sn;
    w.zero_boundary();
    q.zero_boundary();
    block_apply(w, q, aw, aq);
    aw *= su;
    aq *= sn;
    pack(aw, aq, y);
  }

  void build_dense()
  {
    if (grid->interior_count() > kDenseSolverMaxNodes)
      throw std::invalid_argument("dense linear solver is limited to grids with at most 512 interior nodes");
    grid->for_each_interior([&](std::size_t idx, const Index3&) {
      for (int c = 0; c < 3; ++c) dofs.push_back(3 * idx + c);
    });
    const std::size_t half = dofs.size();
    for (std::size_t i = 0; i < half; ++i) dofs.push_back(nn + dofs[i]);
    const auto m = static_cast<Eigen::Index>(dofs.size());
    Eigen::MatrixXd a(m, m);
    std::vector<double> e(2 * nn, 0.0), col;
    for (Eigen::Index j = 0; j < m; ++j) {
      e[dofs[j]] = 1.0;
      scaled_apply(e, col);
      e[dofs[j]] = 0.0;
      for (Eigen::Index i = 0; i < m; ++i) a(i, j) = col[dofs[i]];
    }
    lu.emplace(a);
  }

  // Solves the scaled system for y given the unscaled right-hand side.
  int solve(const VectorField& bw, const VectorField& bq, VectorField& w, VectorField& q, int step_index)
  {
    VectorField sbw = su * bw, sbq = sn * bq;
    sbw.zero_boundary();
    sbq.zero_boundary();
    std::vector<double> b, y;
    pack(sbw, sbq, b);
    int iterations = 0;
    if (lu) {
      Eigen::VectorXd rhs(static_cast<Eigen::Index>(dofs.size()));
      for (std::size_t i = 0; i < dofs.size(); ++i) rhs[static_cast<Eigen::Index>(i)] = b[dofs[i]];
      const Eigen::VectorXd sol = lu->solve(rhs);
      y.assign(2 * nn, 0.0);
      for (std::size_t i = 0; i < dofs.size(); ++i) y[dofs[i]] = sol[static_cast<Eigen::Index>(i)];
    } else {
      VectorField gw = (1.0 / su) * w, gq = (1.0 / sn) * q;  // warm start
      pack(gw, gq, y);
      const auto res = minres([this](const std::vector<double>& x, std::vector<double>& out) { scaled_apply(x, out); },
                              b, y, cfg.krylov_tol, cfg.krylov_max, cfg.deterministic);
      iterations = res.iterations;
      if (!res.converged) {
        std::ostringstream msg;
        msg << "Krylov solve did not converge at step " << step_index << " (relative residual "
            << res.relative_residual << " after " << res.iterations << " iterations)";
        throw NumericalFailure(NumericalFailure::Kind::krylov, step_index, res.history, msg.str());
      }
    }
    unpack(y, w, q);
    w *= su;
    q *= sn;
    w.zero_boundary();
    q.zero_boundary();
    return iterations;
  }

  StepResult advance(const FieldState& s, const Forcing& forcing, int step_index)
  {
    const double dt = cfg.dt;
    // Right-hand sides of the two block rows, scaled by dt/2.
    VectorField bw = p.rho * s.ut;
    bw.axpy(c1, ops.L_uu.apply(s.u));
    bw.axpy(c1, ops.L_cross.apply(s.nu));
    VectorField bq = ops.L_nn.apply(s.nu);
    bq.axpy(1.0, ops.L_cross.apply(s.u));
    bq *= c1;

    VectorField fu, fn;
    if (forcing) {
      fu = VectorField(grid);
      fn = VectorField(grid);
      forcing(s.t + 0.5 * dt, fu, fn);
      bw.axpy(c1, fu);
      bq.axpy(c1, fn);
    }

    StepResult r;
    VectorField w = s.ut, q(grid);
    r.krylov_iterations += solve(bw, bq, w, q, step_index);

    const bool gyro = model == Model::gyro && p.ell != 0.0;
    if (gyro) {
      bool converged = false;
      for (int k = 0; k < cfg.picard_max; ++k) {
        ++r.picard_iterations;
        VectorField rhs_q = bq;
        rhs_q.axpy(-c1 * p.ell, cross(curl(w), q));
        if (!rhs_q.all_finite()) {
          std::ostringstream msg;
          msg << "Picard iteration for the gyroscopic term diverged at step " << step_index << " (iteration " << k
              << ")";
          throw NumericalFailure(NumericalFailure::Kind::picard, step_index, r.picard_history, msg.str());
        }
        VectorField w_new = w, q_new = q;
        r.krylov_iterations += solve(bw, rhs_q, w_new, q_new, step_index);
        const double dw = norm_l2(w_new - w), dq = norm_l2(q_new - q);
        const double nw = norm_l2(w_new), nq = norm_l2(q_new);
        const double change = std::max(nw > 0.0 ? dw / nw : dw, nq > 0.0 ? dq / nq : dq);
        r.picard_history.push_back(change);
        w = std::move(w_new);
        q = std::move(q_new);
        if (change <= cfg.picard_tol) {
          converged = true;
          break;
        }
      }
      if (!converged) {
        std::ostringstream msg;
        msg << "Picard iteration for the gyroscopic term did not converge at step " << step_index << " after "
            << cfg.picard_max << " iterations (last relative change "
            << (r.picard_history.empty() ? 0.0 : r.picard_history.back()) << ")";
        throw NumericalFailure(NumericalFailure::Kind::picard, step_index, r.picard_history, msg.str());
      }
    }

    r.next.t = s.t + dt;
    r.next.u = s.u;
    r.next.u.axpy(dt, w);
    r.next.ut = 2.0 * w;
    r.next.ut -= s.ut;
    r.next.nu = s.nu;
    r.next.nu.axpy(dt, q);
    r.next = pin_boundary(std::move(r.next));
    if (!r.next.u.all_finite() || !r.next.ut.all_finite() || !r.next.nu.all_finite())
      throw NumericalFailure(NumericalFailure::Kind::krylov, step_index, {}, "non-finite state after step");
    if (forcing) r.forcing_work = dt * (inner(fu, w) + inner(fn, q));
    r.ut_half = std::move(w);
    r.nut_half = std::move(q);
    return r;
  }
};

Stepper::Stepper(const DiscreteOperators& ops, const MaterialParams& p, const SolverConfig& cfg, Model model)
    : impl_(std::make_unique<Impl>(ops, p, cfg, model))
{
}
Stepper::~Stepper() = default;
Stepper::Stepper(Stepper&&) noexcept = default;
Stepper& Stepper::operator=(Stepper&&) noexcept = default;

StepResult Stepper::advance(const FieldState& s, const Forcing& forcing, int step_index)
{
  return impl_->advance(s, forcing, step_index);
}

StepResult step(const FieldState& s, const DiscreteOperators& ops, const MaterialParams& p, const SolverConfig& cfg,
                Model model, const Forcing& forcing)
{
  Stepper stepper(ops, p, cfg, model);
  return stepper.advance(s, forcing, 1);
}

int step_count(const SolverConfig& cfg)
{
  if (!(cfg.dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (cfg.t_end < 0.0) throw std::invalid_argument("t_end must be nonnegative");
  return static_cast<int>(std::llround(cfg.t_end / cfg.dt));
}

Trajectory run(GridPtr grid, const MaterialParams& p, const FieldState& s0, const SolverConfig& cfg, Model model,
               const Forcing& forcing)
{
  const DerivedCoefficients c = derive_coefficients(p);
  const DiscreteOperators ops = assemble_operators(grid, c, p);
  const int nsteps = step_count(cfg);
  const int every = std::max(1, cfg.record_every);

  Trajectory traj;
  if (cfg.dt > accuracy_dt_guard(*grid, p)) {
    std::ostringstream msg;
    msg << "dt = " << cfg.dt << " exceeds h/sqrt((mu+xi)/rho) = " << accuracy_dt_guard(*grid, p)
        << "; the scheme stays stable but wave accuracy degrades";
    traj.warnings.push_back(msg.str());
  }

  StepRecord rec0;
  rec0.t = s0.t;
  rec0.energy = total_energy(s0, p, c);
  traj.steps.push_back(rec0);
  traj.states.push_back(s0);
  traj.recorded_steps.push_back(0);
  if (nsteps == 0) return traj;

  Stepper stepper(ops, p, cfg, model);
  FieldState s = s0;
  double e_prev = rec0.energy.total;
  for (int n = 1; n <= nsteps; ++n) {
    StepResult r = stepper.advance(s, forcing, n);
    StepRecord rec;
    rec.step = n;
    rec.t = r.next.t;
    rec.energy = total_energy(r.next, p, c);
    const double nut2 = inner(r.nut_half, r.nut_half);
    rec.diss_phason = cfg.dt * p.varsigma * nut2;
    if (p.eps_visc != 0.0) {
      const EdgeGradient g = edge_gradient(r.ut_half);
      rec.diss_u = cfg.dt * p.eps_visc * inner(g, g);
    }
    if (p.delta_visc != 0.0) {
      const EdgeGradient g = edge_gradient(r.nut_half);
      rec.diss_nu = cfg.dt * p.delta_visc * inner(g, g);
    }
    rec.energy.dissipated_step = rec.diss_phason + rec.diss_u + rec.diss_nu;
    const VectorField cu = curl(r.ut_half);
    rec.energy.gyro_power = inner(cross(cu, r.nut_half), r.nut_half);
    rec.curl_ut_norm = norm_l2(cu);
    rec.nut_norm = std::sqrt(nut2);
    rec.forcing_work = r.forcing_work;
    rec.balance_residual = std::fabs(rec.energy.total - e_prev + rec.energy.dissipated_step - rec.forcing_work) /
                           std::max(std::fabs(e_prev), 1.0);
    rec.nu_t_maxnorm = max_norm(r.nut_half);
    rec.picard_iterations = r.picard_iterations;
    rec.krylov_iterations = r.krylov_iterations;
    e_prev = rec.energy.total;
    traj.steps.push_back(rec);
    s = std::move(r.next);
    if (n % every == 0 || n == nsteps) {
      traj.states.push_back(s);
      traj.recorded_steps.push_back(n);
    }
  }
  return traj;
}

}  // namespace qcsim
