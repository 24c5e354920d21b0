#include "qcsim/material.hpp"

#include <algorithm>
#include <cmath>

namespace qcsim {

DerivedCoefficients derive_coefficients(const MaterialParams& p)
{
  DerivedCoefficients c;
  c.xi = p.lambda + p.mu;
  c.xibar = p.k3 + 0.5 * p.k3p;
  c.zeta = p.k2 + p.k2p;
  c.gamma = p.k1 + p.k2 - p.k2p;
  c.kappa = 0.5 * p.k3p;
  c.kappa0 = p.k0;
  return c;
}

bool AdmissibilityReport::violates(const std::string& name) const
{
  return std::any_of(violations.begin(), violations.end(),
                     [&](const Violation& v) { return v.name == name; });
}

namespace {

bool is_marginal(double a, double b)
{
  return std::fabs(a - b) < 1e-12 * std::max({std::fabs(a), std::fabs(b), 1.0});
}

class Checker {
 public:
  explicit Checker(AdmissibilityReport& r) : report_(r) {}

  void greater(const std::string& name, double lhs, double rhs)
  {
    if (!(lhs > rhs)) fail(name, lhs, rhs);
  }

  void greater_equal(const std::string& name, double lhs, double rhs)
  {
    if (!(lhs >= rhs)) fail(name, lhs, rhs);
  }

  void warn_if_marginal(const std::string& name, double lhs, double rhs)
  {
    if (is_marginal(lhs, rhs)) report_.warnings.push_back({name, lhs, rhs, true});
  }

 private:
  void fail(const std::string& name, double lhs, double rhs)
  {
    report_.pass = false;
    report_.violations.push_back({name, lhs, rhs, is_marginal(lhs, rhs)});
  }

  AdmissibilityReport& report_;
};

}  // namespace

double energy_form_min_eigenvalue(const MaterialParams& p)
{
  // psi splits into a volumetric block (tr eps, tr N), five identical
  // deviatoric blocks (dev eps, dev Sym N) and three skew entries (Skw N).
  auto min_eig = [](double a, double b, double c) {
    return 0.5 * (a + c) - std::sqrt(0.25 * (a - c) * (a - c) + b * b);
  };
  const double vol = min_eig(3.0 * p.lambda + 2.0 * p.mu, 3.0 * p.k3 + p.k3p, 3.0 * p.k1 + 2.0 * p.k2);
  const double dev = min_eig(2.0 * p.mu, p.k3p, 2.0 * p.k2);
  const double skew = 2.0 * p.k2p;
  return std::min({vol, dev, skew});
}

AdmissibilityReport check_admissibility(const MaterialParams& p, AdmissibilityMode mode)
{
  AdmissibilityReport report;
  Checker check(report);

  check.greater("rho>0", p.rho, 0.0);
  check.greater("varsigma>0", p.varsigma, 0.0);
  check.greater_equal("ell>=0", p.ell, 0.0);
  check.greater_equal("eps_visc>=0", p.eps_visc, 0.0);
  check.greater_equal("delta_visc>=0", p.delta_visc, 0.0);

  if (mode == AdmissibilityMode::energy) {
    check.greater("mu>0", p.mu, 0.0);
    check.greater("lambda+mu>0", p.lambda + p.mu, 0.0);
    check.greater("k1>0", p.k1, 0.0);
    check.greater("k1>|k2|", p.k1, std::fabs(p.k2));
    check.greater("|k3|<sqrt(mu(k1+k2)/2)", std::sqrt(std::max(0.5 * p.mu * (p.k1 + p.k2), 0.0)),
                  std::fabs(p.k3));
    check.greater_equal("k0>=0", p.k0, 0.0);
    // The list above does not constrain k2' or k3'; positivity of the
    // quadratic form itself is checked directly.
    const double e = energy_form_min_eigenvalue(p);
    const double scale = std::max({std::fabs(p.lambda), std::fabs(p.mu), std::fabs(p.k1), std::fabs(p.k2),
                                   std::fabs(p.k2p), std::fabs(p.k3), std::fabs(p.k3p), 1.0});
    check.greater_equal("energy form positive semidefinite", e, -1e-12 * scale);
    return report;
  }

  const DerivedCoefficients c = derive_coefficients(p);
  check.greater("mu>-lambda", p.mu, -p.lambda);
  check.greater("kappa>0", c.kappa, 0.0);
  check.greater("xibar>0", c.xibar, 0.0);
  check.greater("mu,zeta>2kappa", std::min(p.mu, c.zeta), 2.0 * c.kappa);
  check.greater("xi,gamma>2xibar", std::min(c.xi, c.gamma), 2.0 * c.xibar);
  check.greater_equal("kappa0>=0", c.kappa0, 0.0);
  check.warn_if_marginal("kappa0>0", c.kappa0, 0.0);
  return report;
}

namespace {

Mat3 checked_strain(const Mat3& e)
{
  if (max_asymmetry(e) > kStrainSymmetryTol)
    throw std::invalid_argument("eps_strain is not symmetric (asymmetry above 1e-12)");
  return sym(e);
}

}  // namespace

double energy_density(const MaterialParams& p, const SmallStrainInputs& s)
{
  const Mat3 e = checked_strain(s.eps_strain);
  const Mat3 sn = sym(s.N);
  const Mat3 kn = skw(s.N);
  const double tr_e = trace(e);
  const double tr_n = trace(s.N);
  return 0.5 * p.lambda * tr_e * tr_e + p.mu * ddot(e, e) + 0.5 * p.k1 * tr_n * tr_n +
         p.k2 * ddot(sn, sn) + p.k2p * ddot(kn, kn) + p.k3 * tr_e * tr_n + p.k3p * ddot(sn, e) +
         0.5 * p.k0 * dot(s.nu, s.nu);
}

Mat3 stress_sigma(const MaterialParams& p, const SmallStrainInputs& s, Response r)
{
  const Mat3 e = checked_strain(s.eps_strain);
  const Mat3 id = identity_mat();
  Mat3 sigma = (p.lambda * trace(e)) * id + (2.0 * p.mu) * e + (p.k3 * trace(s.N)) * id + p.k3p * sym(s.N);
  if (r == Response::dissipative) {
    if (s.grad_ut)
      sigma = sigma + p.eps_visc * *s.grad_ut;
    else if (p.eps_visc > 0.0)
      throw IncompleteInput("stress_sigma: grad_ut required for a dissipative evaluation with eps_visc > 0");
  }
  return sigma;
}

Mat3 phason_stress(const MaterialParams& p, const SmallStrainInputs& s, Response r)
{
  const Mat3 e = checked_strain(s.eps_strain);
  const Mat3 id = identity_mat();
  Mat3 st = (p.k1 * trace(s.N)) * id + (2.0 * p.k2) * sym(s.N) + (2.0 * p.k2p) * skw(s.N) +
            (p.k3 * trace(e)) * id + p.k3p * e;
  if (r == Response::dissipative) {
    if (s.grad_nut)
      st = st + p.delta_visc * *s.grad_nut;
    else if (p.delta_visc > 0.0)
      throw IncompleteInput("phason_stress: grad_nut required for a dissipative evaluation with delta_visc > 0");
  }
  return st;
}

Vec3 self_action(const MaterialParams& p, const Vec3& nu, const Vec3& nu_t)
{
  return p.k0 * nu + p.varsigma * nu_t;
}

}  // namespace qcsim
