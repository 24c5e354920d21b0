#include "qcsim/manufactured.hpp"

#include <cmath>
#include <numbers>

namespace qcsim {

namespace {

struct Bump {
  int dim;
  std::array<double, 3> k{};  // pi / L_a

  double value(const Vec3& x) const
  {
    double v = 1.0;
    for (int a = 0; a < dim; ++a) v *= std::sin(k[a] * x[a]);
    return v;
  }

  Vec3 gradient(const Vec3& x) const
  {
    Vec3 g = zero_vec();
    for (int a = 0; a < dim; ++a) {
      double v = k[a] * std::cos(k[a] * x[a]);
      for (int b = 0; b < dim; ++b)
        if (b != a) v *= std::sin(k[b] * x[b]);
      g[a] = v;
    }
    return g;
  }

  Mat3 hessian(const Vec3& x) const
  {
    Mat3 h = zero_mat();
    for (int a = 0; a < dim; ++a)
      for (int b = 0; b < dim; ++b) {
        double v = 1.0;
        for (int c = 0; c < dim; ++c) {
          const int order = (c == a) + (c == b);
          if (order == 0)
            v *= std::sin(k[c] * x[c]);
          else if (order == 1)
            v *= k[c] * std::cos(k[c] * x[c]);
          else
            v *= -k[c] * k[c] * std::sin(k[c] * x[c]);
        }
        h[a][b] = v;
      }
    return h;
  }

  // Laplacian and grad-div of phi(x) * a.
  Vec3 laplacian(const Vec3& x, const Vec3& a) const { return trace(hessian(x)) * a; }

  Vec3 grad_div(const Vec3& x, const Vec3& a) const
  {
    const Mat3 h = hessian(x);
    Vec3 r = zero_vec();
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) r[i] += h[i][j] * a[j];
    return r;
  }
};

}  // namespace

ManufacturedSolution sine_bump_solution(const MaterialParams& p, int dim, const std::array<double, 3>& extent,
                                        const Vec3& a_u, const Vec3& a_nu)
{
  Bump bump{dim};
  for (int a = 0; a < dim; ++a) bump.k[a] = std::numbers::pi / extent[a];
  const DerivedCoefficients c = derive_coefficients(p);

  ManufacturedSolution m;
  m.name = "sine_bump";
  m.u = [=](const Vec3& x, double t) { return (bump.value(x) * std::cos(t)) * a_u; };
  m.ut = [=](const Vec3& x, double t) { return (-bump.value(x) * std::sin(t)) * a_u; };
  m.nu = [=](const Vec3& x, double t) { return (bump.value(x) * std::cos(t)) * a_nu; };

  m.force_u = [=](const Vec3& x, double t) {
    const double ct = std::cos(t), st = std::sin(t);
    const Vec3 utt = (-bump.value(x) * ct) * a_u;
    Vec3 f = p.rho * utt;
    f = f - ct * (p.mu * bump.laplacian(x, a_u) + c.xi * bump.grad_div(x, a_u));
    f = f - ct * (c.kappa * bump.laplacian(x, a_nu) + c.xibar * bump.grad_div(x, a_nu));
    f = f - (-st * p.eps_visc) * bump.laplacian(x, a_u);
    return f;
  };

  m.force_nu = [=](const Vec3& x, double t) {
    const double ct = std::cos(t), st = std::sin(t);
    const double phi = bump.value(x);
    const Vec3 nut = (-phi * st) * a_nu;
    const Vec3 curl_ut = -st * cross(bump.gradient(x), a_u);
    Vec3 f = p.varsigma * nut + p.ell * cross(curl_ut, nut);
    f = f - (-st * p.delta_visc) * bump.laplacian(x, a_nu);
    f = f - ct * (c.zeta * bump.laplacian(x, a_nu) + c.gamma * bump.grad_div(x, a_nu) - (c.kappa0 * phi) * a_nu);
    f = f - ct * (c.kappa * bump.laplacian(x, a_u) + c.xibar * bump.grad_div(x, a_u));
    return f;
  };
  return m;
}

ManufacturedSolution static_affine_solution(const Mat3& G, const Vec3& b)
{
  ManufacturedSolution m;
  m.name = "static_affine";
  m.u = [=](const Vec3& x, double) {
    Vec3 r = b;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) r[i] += G[i][j] * x[j];
    return r;
  };
  m.ut = [](const Vec3&, double) { return zero_vec(); };
  m.nu = [](const Vec3&, double) { return zero_vec(); };
  m.force_u = [](const Vec3&, double) { return zero_vec(); };
  m.force_nu = [](const Vec3&, double) { return zero_vec(); };
  return m;
}

ManufacturedSolution zero_solution()
{
  ManufacturedSolution m = static_affine_solution(zero_mat(), zero_vec());
  m.name = "zero";
  return m;
}

}  // namespace qcsim
