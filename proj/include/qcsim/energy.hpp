#pragma once

#include "qcsim/grid.hpp"
#include "qcsim/material.hpp"

namespace qcsim {

/// Discrete state (u, u_t, nu) at one instant. u and nu carry the Dirichlet
/// data on boundary nodes; u_t vanishes there.
struct FieldState {
  double t = 0.0;
  VectorField u;
  VectorField ut;
  VectorField nu;
};

/// Itemized discrete energy. Gradients are edge gradients and divergences are
/// cell divergences, the factors of the discrete Laplacian and grad-div.
struct EnergyReport {
  double kinetic = 0.0;           ///< rho/2 ||u_t||^2
  double phason_potential = 0.0;  ///< kappa0/2 ||nu||^2
  double grad_u = 0.0;            ///< mu/2 ||grad u||^2
  double grad_nu = 0.0;           ///< zeta/2 ||grad nu||^2
  double div_u = 0.0;             ///< xi/2 ||div u||^2
  double div_nu = 0.0;            ///< gamma/2 ||div nu||^2
  double cross_grad = 0.0;        ///< kappa <grad u, grad nu>
  double cross_div = 0.0;         ///< xibar <div u, div nu>
  double total = 0.0;
  /// Filled in only with step context.
  double dissipated_step = 0.0;
  double gyro_power = 0.0;
};

EnergyReport total_energy(const FieldState& s, const MaterialParams& p, const DerivedCoefficients& c);

}  // namespace qcsim
