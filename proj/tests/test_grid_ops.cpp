#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "qcsim/grid_ops.hpp"
#include "support/oracles.hpp"

using namespace qcsim;

namespace {

GridPtr grid2(int n, double extent = 1.0) { return make_grid(2, {n, n, 1}, {extent, extent, 1.0}); }
GridPtr grid3(int n, double extent = 1.0) { return make_grid(3, {n, n, n}, {extent, extent, extent}); }

std::vector<GridPtr> test_grids()
{
  return {grid2(5), make_grid(2, {4, 6, 1}, {1.0, 1.5, 1.0}), grid3(3), make_grid(3, {3, 4, 5}, {0.8, 1.0, 1.2})};
}

// Interior nodes at distance >= 2 from the boundary along every existing axis.
bool deep_interior(const Grid& g, const Index3& p)
{
  for (int a = 0; a < g.dim(); ++a)
    if (p[a] < 2 || p[a] > g.n()[a] - 1) return false;
  return true;
}

ScalarField random_scalar(GridPtr g, std::mt19937_64& rng)
{
  ScalarField s(g);
  g->for_each_interior([&](std::size_t idx, const Index3&) { s.values[idx] = oracle::uniform(rng, -1, 1); });
  return s;
}

double max_abs(const ScalarField& s)
{
  double m = 0.0;
  for (double v : s.values) m = std::max(m, std::fabs(v));
  return m;
}

double max_abs(const TensorField& t)
{
  double m = 0.0;
  for (const auto& a : t.values)
    for (const auto& r : a)
      for (double v : r) m = std::max(m, std::fabs(v));
  return m;
}

}  // namespace

TEST_CASE("constant field has vanishing derivatives")
{
  const FieldFunction c = [](const Vec3&) { return Vec3{1, 2, 3}; };
  for (GridPtr g : {make_grid(2, {5, 5, 1}, {1, 1, 1}, c, c), make_grid(3, {4, 4, 4}, {1, 1, 1}, c, c)}) {
    const VectorField f = VectorField::sample(g, c);
    CHECK(max_abs(gradient(f)) < 1e-12);
    CHECK(max_abs(divergence(f)) < 1e-12);
    CHECK(oracle::max_abs(curl(f)) < 1e-12);
    CHECK(oracle::max_abs(vec_laplacian(f)) < 1e-12);
    CHECK(oracle::max_abs(grad_div(f)) < 1e-12);
    CHECK(norm_l2(edge_gradient(f)) < 1e-12);
    CHECK(norm_l2(cell_divergence(f)) < 1e-12);
  }
}

TEST_CASE("divergence of (x1, 0, 0) is one")
{
  const FieldFunction f1 = [](const Vec3& x) { return Vec3{x[0], 0, 0}; };
  for (GridPtr base : {grid2(7), grid3(4)}) {
    GridPtr g = make_grid(base->dim(), base->n(), base->extent(), f1, {});
    const VectorField f = VectorField::sample(g, f1);
    const ScalarField d = divergence(f);
    g->for_each_interior([&](std::size_t idx, const Index3&) { CHECK(d.values[idx] == doctest::Approx(1.0).epsilon(1e-12)); });
    const CellField cd = cell_divergence(f);
    g->for_each_cell([&](std::size_t idx, const Index3&) { CHECK(cd.values[idx] == doctest::Approx(1.0).epsilon(1e-12)); });
  }
}

TEST_CASE("vector Laplacian of (x1^2, 0, 0) is (2, 0, 0)")
{
  const FieldFunction q = [](const Vec3& x) { return Vec3{x[0] * x[0], 0, 0}; };
  for (GridPtr base : {grid2(7), grid3(4)}) {
    GridPtr g = make_grid(base->dim(), base->n(), base->extent(), q, {});
    const VectorField l = vec_laplacian(VectorField::sample(g, q));
    g->for_each_interior([&](std::size_t idx, const Index3&) {
      CHECK(l.values[idx][0] == doctest::Approx(2.0).epsilon(1e-9));
      CHECK(std::fabs(l.values[idx][1]) < 1e-12);
      CHECK(std::fabs(l.values[idx][2]) < 1e-12);
    });
  }
}

TEST_CASE("norm examples")
{
  GridPtr g = grid2(9);
  CHECK(g->h()[0] == doctest::Approx(0.1));
  const VectorField one = VectorField::sample(g, [](const Vec3&) { return Vec3{1, 0, 0}; });
  CHECK(norm_l2(one) * norm_l2(one) == doctest::Approx(0.81).epsilon(1e-14));

  const VectorField zero(g);
  CHECK(norm_l2(zero) == 0.0);
  CHECK(norm_h1(zero) == 0.0);
  CHECK(norm_l2(gradient(zero)) == 0.0);

  GridPtr s = grid2(3, 2.0);
  CHECK(s->h()[0] == 0.5);
  VectorField spike(s);
  spike[s->index(2, 2, 0)] = {1, 0, 0};
  CHECK(norm_l2(spike) * norm_l2(spike) == 0.25);
  CHECK(inner(spike, spike) == 0.25);
}

TEST_CASE("norm_h1 combines the L2 norm and the edge gradient")
{
  std::mt19937_64 rng(3);
  for (GridPtr g : test_grids()) {
    const VectorField f = oracle::random_field(g, rng);
    const double l2 = norm_l2(f), g2 = norm_l2(edge_gradient(f));
    CHECK(norm_h1(f) == doctest::Approx(std::sqrt(l2 * l2 + g2 * g2)).epsilon(1e-14));
    double m = 0.0;
    g->for_each_interior([&](std::size_t idx, const Index3&) { m = std::max(m, norm(f.values[idx])); });
    CHECK(max_norm(f) == m);
  }
}

TEST_CASE("operands on different grids are rejected")
{
  GridPtr a = grid2(5), b = grid2(6), a2 = grid2(5);
  const VectorField fa(a), fb(b), fa2(a2);
  CHECK_THROWS_AS(inner(fa, fb), GridMismatch);
  CHECK_THROWS_AS(cross(fa, fb), GridMismatch);
  CHECK_THROWS_AS(inner(edge_gradient(fa), edge_gradient(fb)), GridMismatch);
  CHECK_THROWS_AS(inner(cell_divergence(fa), cell_divergence(fb)), GridMismatch);
  CHECK_THROWS_AS(inner(gradient(fa), gradient(fb)), GridMismatch);
  CHECK_THROWS_AS(inner(divergence(fa), divergence(fb)), GridMismatch);
  VectorField sum = fa;
  CHECK_THROWS_AS(sum += fb, GridMismatch);
  CHECK_NOTHROW(inner(fa, fa2));
  CHECK_THROWS_AS(inner(VectorField(), fa), GridMismatch);
}

TEST_CASE("grid construction invariants")
{
  CHECK_THROWS_AS(Grid(2, {2, 5, 1}, {1, 1, 1}), std::invalid_argument);
  CHECK_THROWS_AS(Grid(4, {5, 5, 5}, {1, 1, 1}), std::invalid_argument);
  CHECK_THROWS_AS(Grid(2, {5, 5, 1}, {0, 1, 1}), std::invalid_argument);
  for (GridPtr g : test_grids()) {
    for (int a = 0; a < g->dim(); ++a) CHECK(g->extent()[a] == doctest::Approx((g->n()[a] + 1) * g->h()[a]));
    CHECK(g->boundary_nodes().size() + g->interior_count() == g->node_count());
    CHECK(g->bc_u().size() == g->boundary_nodes().size());
    CHECK(g->bc_nu().size() == g->boundary_nodes().size());
    for (std::size_t b : g->boundary_nodes()) CHECK(g->is_boundary(g->unravel(b)));
    std::size_t interior = 0;
    g->for_each_interior([&](std::size_t idx, const Index3& p) {
      CHECK(!g->is_boundary(p));
      CHECK(g->index(p) == idx);
      ++interior;
    });
    CHECK(interior == g->interior_count());
  }
  Grid g(2, {5, 5, 1}, {1, 1, 1});
  CHECK_THROWS_AS(g.set_boundary_data(std::vector<Vec3>(3), std::vector<Vec3>(3)), std::invalid_argument);
}

TEST_CASE("summation by parts with the edge gradient and cell divergence")
{
  std::mt19937_64 rng(17);
  for (GridPtr g : test_grids()) {
    for (int trial = 0; trial < 5; ++trial) {
      const VectorField f = oracle::random_field(g, rng);
      const VectorField h = oracle::random_field(g, rng);
      const double scale_g = norm_l2(edge_gradient(f)) * norm_l2(edge_gradient(h)) + 1.0;
      CHECK(std::fabs(inner(vec_laplacian(f), h) + inner(edge_gradient(f), edge_gradient(h))) <= 1e-12 * scale_g);
      const double scale_d = norm_l2(cell_divergence(f)) * norm_l2(cell_divergence(h)) + 1.0;
      CHECK(std::fabs(inner(grad_div(f), h) + inner(cell_divergence(f), cell_divergence(h))) <= 1e-12 * scale_d);
      // Both operators are symmetric.
      CHECK(std::fabs(inner(vec_laplacian(f), h) - inner(f, vec_laplacian(h))) <= 1e-12 * scale_g);
      CHECK(std::fabs(inner(grad_div(f), h) - inner(f, grad_div(h))) <= 1e-12 * scale_d);
    }
  }
}

TEST_CASE("div curl and curl grad vanish away from the boundary")
{
  std::mt19937_64 rng(23);
  for (GridPtr g : {grid2(7), grid3(6), make_grid(3, {5, 6, 7}, {1.0, 1.1, 1.3})}) {
    const VectorField f = oracle::random_field(g, rng);
    const ScalarField dc = divergence(curl(f));
    const VectorField cg = curl(scalar_gradient(random_scalar(g, rng)));
    const double scale = 1.0 / (g->h()[0] * g->h()[0]);
    int visited = 0;
    g->for_each_interior([&](std::size_t idx, const Index3& p) {
      if (!deep_interior(*g, p)) return;
      ++visited;
      CHECK(std::fabs(dc.values[idx]) <= 1e-12 * scale);
      CHECK(norm(cg.values[idx]) <= 1e-12 * scale);
    });
    CHECK(visited > 0);
  }
}

TEST_CASE("gyroscopic cross product is orthogonal to the rate")
{
  std::mt19937_64 rng(29);
  for (GridPtr g : test_grids()) {
    const VectorField c = curl(oracle::random_field(g, rng));
    const VectorField v = oracle::random_field(g, rng, 3.0);
    const VectorField x = cross(c, v);
    g->for_each_interior([&](std::size_t idx, const Index3&) {
      const double bound = 1e-14 * norm(c.values[idx]) * dot(v.values[idx], v.values[idx]);
      CHECK(std::fabs(dot(x.values[idx], v.values[idx])) <= bound);
    });
    CHECK(std::fabs(inner(x, v)) <= 1e-14 * norm_l2(c) * norm_l2(v) * norm_l2(v) + 1e-300);
  }
}

TEST_CASE("operators are linear")
{
  std::mt19937_64 rng(31);
  for (GridPtr g : test_grids()) {
    const VectorField f = oracle::random_field(g, rng), h = oracle::random_field(g, rng);
    const double a = 0.7, b = -1.3;
    const VectorField mix = a * f + b * h;
    const double tol = 1e-12 / (g->h()[0] * g->h()[0]);
    CHECK(oracle::max_diff(vec_laplacian(mix), a * vec_laplacian(f) + b * vec_laplacian(h)) < tol);
    CHECK(oracle::max_diff(grad_div(mix), a * grad_div(f) + b * grad_div(h)) < tol);
    CHECK(oracle::max_diff(curl(mix), a * curl(f) + b * curl(h)) < tol);
    const ScalarField dm = divergence(mix), df = divergence(f), dh = divergence(h);
    for (std::size_t i = 0; i < dm.values.size(); ++i) CHECK(std::fabs(dm.values[i] - (a * df.values[i] + b * dh.values[i])) < tol);
    const TensorField gm = gradient(mix), gf = gradient(f), gh = gradient(h);
    for (std::size_t i = 0; i < gm.values.size(); ++i)
      for (int r = 0; r < 3; ++r)
        for (int s = 0; s < 3; ++s)
          CHECK(std::fabs(gm.values[i][r][s] - (a * gf.values[i][r][s] + b * gh.values[i][r][s])) < tol);
  }
}

TEST_CASE("energy operators match the dense Kronecker construction")
{
  std::mt19937_64 rng(37);
  for (GridPtr g : test_grids()) {
    const Eigen::MatrixXd lap = oracle::vector_laplacian(*g);
    const Eigen::MatrixXd gd = oracle::grad_div(*g);
    const Eigen::MatrixXd c = oracle::cell_divergence(*g);
    const VectorField f = oracle::random_field(g, rng);
    const Eigen::VectorXd x = oracle::to_dofs(f);
    const double scale = 1.0 / (g->h()[0] * g->h()[0]);

    CHECK((oracle::to_dofs(vec_laplacian(f)) - lap * x).cwiseAbs().maxCoeff() <= 1e-12 * scale);
    CHECK((oracle::to_dofs(grad_div(f)) - gd * x).cwiseAbs().maxCoeff() <= 1e-12 * scale);

    const CellField cd = cell_divergence(f);
    const Eigen::VectorXd cx = c * x;
    Eigen::Index row = 0;
    double worst = 0.0;
    g->for_each_cell([&](std::size_t idx, const Index3&) { worst = std::max(worst, std::fabs(cd.values[idx] - cx[row++])); });
    CHECK(row == cx.size());
    CHECK(worst <= 1e-12 * std::sqrt(scale));

    // Edge-gradient energy equals the Laplacian quadratic form.
    const double eg = norm_l2(edge_gradient(f));
    CHECK(eg * eg == doctest::Approx(-g->cell_volume() * x.dot(lap * x)).epsilon(1e-12));
  }
}
