#pragma once

#include <utility>
#include <vector>

#include "qcsim/dynamics.hpp"
#include "qcsim/manufactured.hpp"

namespace qcsim {

/// |E_n - E_{n-1} + dissipated_n - work_n| / max(|E_{n-1}|, 1) for n >= 1,
/// recomputed from the ledger entries of a trajectory.
struct BalanceSeries {
  std::vector<double> residuals;
  double max_residual = 0.0;
};

BalanceSeries energy_balance_residual(const Trajectory& traj);

/// Monitors
///   rho ||u_t||^2 + 2 varsigma int ||nu_t||^2 + kappa0 ||nu||^2
///     + (mu ||grad u||^2 + zeta ||grad nu||^2) / 2
///     + int (eps ||grad u_t||^2 + delta ||grad nu_t||^2)
/// against
///   cbar = rho ||u_t(0)||^2 + kappa0 ||nu(0)||^2 + (mu + |kappa|) ||grad u(0)||^2
///        + (zeta + |kappa|) ||grad nu(0)||^2 + (xi + |xibar|) ||div u(0)||^2
///        + (gamma + |xibar|) ||div nu(0)||^2,
/// the initial energy with the coupling terms bounded by Young's inequality.
/// Time integrals use the stepper's midpoint rates.
struct BoundReport {
  bool admissible = true;  ///< theorem-mode admissibility of the parameters
  double cbar = 0.0;
  double twice_initial_energy = 0.0;
  std::vector<double> lhs;    ///< one entry per ledger entry
  std::vector<double> ratio;  ///< lhs / cbar (0 when cbar = 0 and lhs = 0)
  double max_ratio = 0.0;
  bool exceeded = false;      ///< flagged, not an error
};

BoundReport apriori_bound_monitor(const Trajectory& traj, const MaterialParams& p, const DerivedCoefficients& c);

struct ViscosityRung {
  double eps_visc = 0.0;
  double delta_visc = 0.0;
  double diff_u = 0.0;   ///< sqrt(sum_n dt ||u^n - u_ref^n||^2)
  double diff_nu = 0.0;
};

struct ConvergenceTable {
  double ref_eps = 0.0;
  double ref_delta = 0.0;
  std::vector<ViscosityRung> rungs;
  bool monotone = true;             ///< d_{k+1} <= 1.1 d_k for both fields
  bool strictly_decreasing = true;  ///< d_{k+1} < d_k for both fields
};

/// Runs every rung of the ladder (concurrently) and compares it with the
/// reference: the (0, 0) run when ell = 0 or the model is linear, otherwise
/// the last rung, which is then omitted from the table.
ConvergenceTable viscosity_continuation(GridPtr grid, const MaterialParams& p, const FieldState& s0,
                                        const SolverConfig& cfg, const std::vector<std::pair<double, double>>& ladder,
                                        Model model = Model::linear);

struct MmsConfig {
  int dim = 2;
  std::vector<int> levels{7, 15, 31};  ///< interior nodes per axis
  double extent = 1.0;
  double t_end = 0.5;
  double dt_over_h = 0.5;  ///< dt is the largest value <= dt_over_h * h dividing t_end
  SolverConfig solver;     ///< dt and t_end are overwritten per level
  Model model = Model::linear;
};

struct MmsLevel {
  int n = 0;
  double h = 0.0;
  double dt = 0.0;
  int steps = 0;
  double err_u = 0.0;   ///< discrete L2 error at t_end
  double err_nu = 0.0;
};

struct MmsTable {
  std::vector<MmsLevel> levels;
  double order_u = 0.0;  ///< least-squares slope of log err vs log h; NaN if an error vanishes
  double order_nu = 0.0;
};

/// Throws std::invalid_argument for manufactured fields that are non-finite
/// on the grid or whose boundary values change in time.
MmsTable mms_convergence(const MaterialParams& p, const ManufacturedSolution& m, const MmsConfig& cfg);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

struct DifferenceReport {
  std::vector<double> energy;     ///< total energy of a - b per step
  std::vector<double> residuals;  ///< |dE + dissipated| / E(0) of the difference
  double max_residual = 0.0;
  bool energy_nonincreasing = true;
  double max_difference = 0.0;    ///< largest nodal difference over all steps
  bool identical = false;         ///< all steps bitwise equal
  double superposition_error = 0.0;  ///< max ||(A - B) - C|| / max ||C||, C the run from a - b
};

/// Linear-model difference study; requires ell = 0.
DifferenceReport uniqueness_probe(GridPtr grid, const MaterialParams& p, const FieldState& a, const FieldState& b,
                                  const SolverConfig& cfg);

}  // namespace qcsim
