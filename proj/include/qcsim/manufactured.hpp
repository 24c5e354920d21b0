#pragma once

#include <functional>
#include <string>

#include "qcsim/material.hpp"
#include "qcsim/tensor.hpp"

namespace qcsim {

using SpaceTimeFunction = std::function<Vec3(const Vec3& x, double t)>;

/// Analytic (u*, nu*) with the body forces that make it an exact solution of
/// the forced balance equations. Forcing exists only for verification; the
/// physical models run without it.
struct ManufacturedSolution {
  std::string name;
  SpaceTimeFunction u;
  SpaceTimeFunction ut;
  SpaceTimeFunction nu;
  SpaceTimeFunction force_u;
  SpaceTimeFunction force_nu;
};

/// u* = phi(x) cos(t) a_u, nu* = phi(x) cos(t) a_nu with
/// phi = prod_a sin(pi x_a / L_a) over the existing axes; vanishes on the
/// boundary of [0, L].
ManufacturedSolution sine_bump_solution(const MaterialParams& p, int dim, const std::array<double, 3>& extent,
                                        const Vec3& a_u = {1.0, 0.0, 0.0}, const Vec3& a_nu = {0.0, 1.0, 0.0});

/// Static u* = G x + b, nu* = 0, no forcing.
ManufacturedSolution static_affine_solution(const Mat3& G, const Vec3& b);

ManufacturedSolution zero_solution();

}  // namespace qcsim
