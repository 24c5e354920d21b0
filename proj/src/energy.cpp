#include "qcsim/energy.hpp"

#include "qcsim/grid_ops.hpp"

namespace qcsim {

EnergyReport total_energy(const FieldState& s, const MaterialParams& p, const DerivedCoefficients& c)
{
  const EdgeGradient gu = edge_gradient(s.u);
  const EdgeGradient gn = edge_gradient(s.nu);
  const CellField du = cell_divergence(s.u);
  const CellField dn = cell_divergence(s.nu);

  EnergyReport e;
  e.kinetic = 0.5 * p.rho * inner(s.ut, s.ut);
  e.phason_potential = 0.5 * c.kappa0 * inner(s.nu, s.nu);
  e.grad_u = 0.5 * p.mu * inner(gu, gu);
  e.grad_nu = 0.5 * c.zeta * inner(gn, gn);
  e.div_u = 0.5 * c.xi * inner(du, du);
  e.div_nu = 0.5 * c.gamma * inner(dn, dn);
  e.cross_grad = c.kappa * inner(gu, gn);
  e.cross_div = c.xibar * inner(du, dn);
  e.total = e.kinetic + e.phason_potential + e.grad_u + e.grad_nu + e.div_u + e.div_nu + e.cross_grad +
            e.cross_div;
  return e;
}

}  // namespace qcsim
