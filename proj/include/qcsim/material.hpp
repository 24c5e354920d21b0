#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qcsim/tensor.hpp"

namespace qcsim {

/// Physical constants of a homogeneous isotropic quasicrystal in the
/// small-strain, phason-locked regime.
///
/// `eps_visc` and `delta_visc` are the viscous regularizers acting on the
/// displacement and phason rate gradients; they are unrelated to the small
/// strain tensor (which is `SmallStrainInputs::eps_strain`).
struct MaterialParams {
  double lambda = 0.0;      ///< Lamé modulus
  double mu = 0.0;          ///< Lamé modulus
  double k0 = 0.0;          ///< phason self-action stiffness
  double k1 = 0.0;
  double k2 = 0.0;
  double k2p = 0.0;         ///< k2'
  double k3 = 0.0;
  double k3p = 0.0;         ///< k3'
  double rho = 1.0;         ///< mass density
  double varsigma = 1.0;    ///< phason drag
  double ell = 0.0;         ///< gyroscopic coupling
  double eps_visc = 0.0;
  double delta_visc = 0.0;

  friend bool operator==(const MaterialParams&, const MaterialParams&) = default;
};

/// Reduced constants entering the balance equations.
struct DerivedCoefficients {
  double xi = 0.0;      ///< lambda + mu
  double xibar = 0.0;   ///< k3 + k3'/2
  double zeta = 0.0;    ///< k2 + k2'
  double gamma = 0.0;   ///< k1 + k2 - k2'
  double kappa = 0.0;   ///< k3'/2
  double kappa0 = 0.0;  ///< k0

  friend bool operator==(const DerivedCoefficients&, const DerivedCoefficients&) = default;
};

DerivedCoefficients derive_coefficients(const MaterialParams& p);

enum class AdmissibilityMode { energy, theorem_linear, theorem_gyro };

struct Violation {
  std::string name;
  double lhs = 0.0;  ///< the side that must be larger
  double rhs = 0.0;
  bool marginal = false;  ///< |lhs - rhs| below 1e-12 relative
};

struct AdmissibilityReport {
  bool pass = true;
  std::vector<Violation> violations;
  /// Conditions that hold but sit on the boundary of the admissible set
  /// (for instance k0 = 0 in the theorem modes). They never fail the report.
  std::vector<Violation> warnings;

  bool violates(const std::string& name) const;
};

AdmissibilityReport check_admissibility(const MaterialParams& p, AdmissibilityMode mode);

/// Smallest eigenvalue of the Hessian of the quadratic energy in
/// (Sym grad u, grad nu), in orthonormal coordinates on Sym x Lin.
/// Nonnegative iff the strain/phason-gradient part of psi is positive semidefinite.
double energy_form_min_eigenvalue(const MaterialParams& p);

/// Pointwise kinematic inputs for the constitutive maps.
struct SmallStrainInputs {
  Mat3 eps_strain = zero_mat();  ///< Sym grad u
  Mat3 N = zero_mat();           ///< grad nu
  Vec3 nu = zero_vec();
  std::optional<Mat3> grad_ut;
  std::optional<Mat3> grad_nut;
  std::optional<Vec3> nu_t;
};

/// Selects whether the viscous (rate-dependent) contributions are added.
enum class Response { elastic, dissipative };

/// Thrown when a dissipative evaluation needs a rate field that was not supplied.
class IncompleteInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

double energy_density(const MaterialParams& p, const SmallStrainInputs& s);
Mat3 stress_sigma(const MaterialParams& p, const SmallStrainInputs& s, Response r = Response::elastic);
Mat3 phason_stress(const MaterialParams& p, const SmallStrainInputs& s, Response r = Response::elastic);
Vec3 self_action(const MaterialParams& p, const Vec3& nu, const Vec3& nu_t);

/// Strain asymmetry above which inputs are rejected rather than symmetrized.
inline constexpr double kStrainSymmetryTol = 1e-12;

}  // namespace qcsim
