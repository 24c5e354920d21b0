#pragma once

#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "qcsim/energy.hpp"
#include "qcsim/grid.hpp"
#include "qcsim/material.hpp"

namespace qcsim {

/// f -> laplacian * vec_laplacian(f) + grad_div * grad_div(f) + identity * f
/// at interior nodes.
struct LinearMap {
  double laplacian = 0.0;
  double grad_div = 0.0;
  double identity = 0.0;

  /// Uses the boundary values stored in f.
  VectorField apply(const VectorField& f) const;
  /// Treats f as zero on the boundary.
  VectorField apply_homogeneous(const VectorField& f) const;
};

/// Coupled operators of the balance equations. Applying a map to a field that
/// carries the Dirichlet data equals apply_homogeneous(field) plus the matching
/// offset, where the offsets hold the boundary data's contribution.
struct DiscreteOperators {
  GridPtr grid;
  LinearMap L_uu;     ///< mu Lap + xi grad div, on u
  LinearMap L_cross;  ///< kappa Lap + xibar grad div, u <-> nu
  LinearMap L_nn;     ///< zeta Lap + gamma grad div - kappa0 Id, on nu
  LinearMap R_u;      ///< eps_visc Lap, on u_t
  LinearMap R_n;      ///< delta_visc Lap, on nu_t

  VectorField offset_uu;       ///< L_uu applied to the u boundary data
  VectorField offset_cross_u;  ///< L_cross applied to the u boundary data
  VectorField offset_cross_nu; ///< L_cross applied to the nu boundary data
  VectorField offset_nn;       ///< L_nn applied to the nu boundary data
};

DiscreteOperators assemble_operators(GridPtr grid, const DerivedCoefficients& c, const MaterialParams& p);

enum class Model { linear, gyro };
enum class LinearSolverKind { krylov, dense };

struct SolverConfig {
  double dt = 1e-2;
  double t_end = 0.0;
  double picard_tol = 1e-10;
  int picard_max = 50;
  double krylov_tol = 1e-10;
  int krylov_max = 2000;
  bool deterministic = true;
  int record_every = 1;
  LinearSolverKind linear_solver = LinearSolverKind::krylov;

  friend bool operator==(const SolverConfig&, const SolverConfig&) = default;
};

/// Largest interior node count for which the dense direct solver is allowed.
inline constexpr std::size_t kDenseSolverMaxNodes = 512;

/// Body forces (u-equation, nu-equation) at time t; test scaffolding for
/// manufactured solutions. Production runs pass an empty function.
using Forcing = std::function<void(double t, VectorField& f_u, VectorField& f_nu)>;

class NumericalFailure : public std::runtime_error {
 public:
  enum class Kind { picard, krylov };
  NumericalFailure(Kind kind, int step, std::vector<double> history, const std::string& what)
      : std::runtime_error(what), kind_(kind), step_(step), history_(std::move(history))
  {
  }
  Kind kind() const { return kind_; }
  int step() const { return step_; }
  const std::vector<double>& history() const { return history_; }

 private:
  Kind kind_;
  int step_;
  std::vector<double> history_;
};

struct GateReport {
  bool pass = true;
  AdmissibilityReport material;
  double h1_u0 = 0.0;
  double l2_ut0 = 0.0;
  double h1_nu0 = 0.0;
  bool norms_finite = true;
  bool gyro_checked = false;
  double gyro_lhs = 0.0;  ///< ell * ||u_t(0)||_{1,2}
  double gyro_rhs = 0.0;  ///< varsigma / 2
  std::vector<std::string> failures;
};

GateReport check_theorem_hypotheses(const MaterialParams& p, const Grid& grid, const FieldState& s0, Model mode);

/// Samples initial data at the grid nodes, then pins u, nu to the Dirichlet
/// data and u_t to zero on the boundary.
FieldState project_initial_data(GridPtr grid, const FieldFunction& u0, const FieldFunction& dot_u0,
                                const FieldFunction& nu0);
FieldState project_initial_data(GridPtr grid, const VectorField& u0, const VectorField& dot_u0,
                                const VectorField& nu0);

struct StepResult {
  FieldState next;
  VectorField ut_half;  ///< (u_t^n + u_t^{n+1}) / 2
  VectorField nut_half; ///< (nu^{n+1} - nu^n) / dt
  int picard_iterations = 0;
  int krylov_iterations = 0;
  std::vector<double> picard_history;
  double forcing_work = 0.0;  ///< dt * (<f_u, u_t^half> + <f_nu, nu_t^half>)
};

/// Implicit midpoint stepper with cached solver state; one per trajectory.
class Stepper {
 public:
  Stepper(const DiscreteOperators& ops, const MaterialParams& p, const SolverConfig& cfg, Model model);
  ~Stepper();
  Stepper(Stepper&&) noexcept;
  Stepper& operator=(Stepper&&) noexcept;

  StepResult advance(const FieldState& s, const Forcing& forcing = {}, int step_index = 0);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

StepResult step(const FieldState& s, const DiscreteOperators& ops, const MaterialParams& p, const SolverConfig& cfg,
                Model model = Model::gyro, const Forcing& forcing = {});

/// Per-step ledger entry. Entry 0 describes the initial state.
struct StepRecord {
  int step = 0;
  double t = 0.0;
  EnergyReport energy;
  double diss_phason = 0.0;  ///< dt varsigma ||nu_t^half||^2
  double diss_u = 0.0;       ///< dt eps_visc ||grad u_t^half||^2
  double diss_nu = 0.0;      ///< dt delta_visc ||grad nu_t^half||^2
  double forcing_work = 0.0;
  double curl_ut_norm = 0.0; ///< ||curl u_t^half||
  double nut_norm = 0.0;     ///< ||nu_t^half||
  double balance_residual = 0.0;
  double nu_t_maxnorm = 0.0;
  int picard_iterations = 0;
  int krylov_iterations = 0;
};

struct Trajectory {
  std::vector<StepRecord> steps;   ///< one per step, plus the initial entry
  std::vector<FieldState> states;  ///< recorded every record_every steps
  std::vector<int> recorded_steps;
  std::vector<std::string> warnings;
};

/// Step count for a run: round(t_end / dt).
int step_count(const SolverConfig& cfg);

Trajectory run(GridPtr grid, const MaterialParams& p, const FieldState& s0, const SolverConfig& cfg, Model model,
               const Forcing& forcing = {});

/// dt above which the runner warns, h_min / sqrt((mu + xi) / rho).
double accuracy_dt_guard(const Grid& grid, const MaterialParams& p);

}  // namespace qcsim
