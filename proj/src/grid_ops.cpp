#include "qcsim/grid_ops.hpp"

#include <algorithm>
#include <cmath>

namespace qcsim {

namespace {

// Centered first difference of component c along axis a at node idx.
inline double d0(const Grid& g, const std::vector<Vec3>& v, std::size_t idx, int a, int c)
{
  const std::size_t s = g.stride(a);
  return (v[idx + s][c] - v[idx - s][c]) / (2.0 * g.h()[a]);
}

// Corner offsets {0,1}^dim of a cell, as linear offsets and per-axis bits.
struct Corner {
  std::size_t offset;
  Index3 bit;
};

std::vector<Corner> cell_corners(const Grid& g)
{
  std::vector<Corner> corners;
  const int count = 1 << g.dim();
  for (int m = 0; m < count; ++m) {
    Corner c{0, {0, 0, 0}};
    for (int a = 0; a < g.dim(); ++a) {
      c.bit[a] = (m >> a) & 1;
      if (c.bit[a]) c.offset += g.stride(a);
    }
    corners.push_back(c);
  }
  return corners;
}

}  // namespace

TensorField gradient(const VectorField& f)
{
  const Grid& g = *f.grid;
  TensorField out(f.grid);
  g.for_each_interior([&](std::size_t idx, const Index3&) {
    Mat3& m = out.values[idx];
    for (int a = 0; a < g.dim(); ++a)
      for (int c = 0; c < 3; ++c) m[c][a] = d0(g, f.values, idx, a, c);
  });
  return out;
}

ScalarField divergence(const VectorField& f)
{
  const Grid& g = *f.grid;
  ScalarField out(f.grid);
  g.for_each_interior([&](std::size_t idx, const Index3&) {
    double s = 0.0;
    for (int a = 0; a < g.dim(); ++a) s += d0(g, f.values, idx, a, a);
    out.values[idx] = s;
  });
  return out;
}

VectorField curl(const VectorField& f)
{
  const Grid& g = *f.grid;
  VectorField out(f.grid);
  g.for_each_interior([&](std::size_t idx, const Index3&) {
    // dd[a][c] = d f_c / d x_a, zero along absent axes
    double dd[3][3] = {};
    for (int a = 0; a < g.dim(); ++a)
      for (int c = 0; c < 3; ++c) dd[a][c] = d0(g, f.values, idx, a, c);
    out.values[idx] = {dd[1][2] - dd[2][1], dd[2][0] - dd[0][2], dd[0][1] - dd[1][0]};
  });
  return out;
}

VectorField scalar_gradient(const ScalarField& phi)
{
  const Grid& g = *phi.grid;
  VectorField out(phi.grid);
  g.for_each_interior([&](std::size_t idx, const Index3&) {
    for (int a = 0; a < g.dim(); ++a) {
      const std::size_t s = g.stride(a);
      out.values[idx][a] = (phi.values[idx + s] - phi.values[idx - s]) / (2.0 * g.h()[a]);
    }
  });
  return out;
}

VectorField vec_laplacian(const VectorField& f)
{
  const Grid& g = *f.grid;
  VectorField out(f.grid);
  g.for_each_interior([&](std::size_t idx, const Index3&) {
    Vec3 acc = zero_vec();
    for (int a = 0; a < g.dim(); ++a) {
      const std::size_t s = g.stride(a);
      const double w = 1.0 / (g.h()[a] * g.h()[a]);
      for (int c = 0; c < 3; ++c)
        acc[c] += w * (f.values[idx + s][c] - 2.0 * f.values[idx][c] + f.values[idx - s][c]);
    }
    out.values[idx] = acc;
  });
  return out;
}

EdgeGradient edge_gradient(const VectorField& f)
{
  const Grid& g = *f.grid;
  EdgeGradient out(f.grid);
  for (int b = 0; b < g.dim(); ++b) {
    const std::size_t s = g.stride(b);
    const double inv_h = 1.0 / g.h()[b];
    g.for_each_edge(b, [&](std::size_t idx, const Index3&) {
      out.values[b][idx] = inv_h * (f.values[idx + s] - f.values[idx]);
    });
  }
  return out;
}

CellField cell_divergence(const VectorField& f)
{
  const Grid& g = *f.grid;
  CellField out(f.grid);
  const auto corners = cell_corners(g);
  const double avg = 1.0 / static_cast<double>(1 << (g.dim() - 1));
  g.for_each_cell([&](std::size_t idx, const Index3&) {
    double s = 0.0;
    for (int b = 0; b < g.dim(); ++b) {
      const double w = avg / g.h()[b];
      for (const Corner& c : corners) {
        const double sign = c.bit[b] ? 1.0 : -1.0;
        s += sign * w * f.values[idx + c.offset][b];
      }
    }
    out.values[idx] = s;
  });
  return out;
}

VectorField grad_div(const VectorField& f)
{
  const Grid& g = *f.grid;
  const CellField s = cell_divergence(f);
  VectorField out(f.grid);
  const auto corners = cell_corners(g);
  const double avg = 1.0 / static_cast<double>(1 << (g.dim() - 1));
  // Adjoint of cell_divergence: node p is corner `c` of the cell whose lower
  // corner sits at p - c.offset.
  g.for_each_interior([&](std::size_t idx, const Index3&) {
    Vec3 acc = zero_vec();
    for (int b = 0; b < g.dim(); ++b) {
      const double w = avg / g.h()[b];
      double sum = 0.0;
      for (const Corner& c : corners) {
        const double sign = c.bit[b] ? 1.0 : -1.0;
        sum += sign * s.values[idx - c.offset];
      }
      acc[b] = -w * sum;
    }
    out.values[idx] = acc;
  });
  return out;
}

VectorField cross(const VectorField& a, const VectorField& b)
{
  require_same_grid(a.grid, b.grid);
  VectorField out(a.grid);
  a.grid->for_each_interior(
      [&](std::size_t idx, const Index3&) { out.values[idx] = cross(a.values[idx], b.values[idx]); });
  return out;
}

double inner(const VectorField& f, const VectorField& g)
{
  require_same_grid(f.grid, g.grid);
  double s = 0.0;
  f.grid->for_each_interior([&](std::size_t idx, const Index3&) { s += dot(f.values[idx], g.values[idx]); });
  return f.grid->cell_volume() * s;
}

double inner(const TensorField& f, const TensorField& g)
{
  require_same_grid(f.grid, g.grid);
  double s = 0.0;
  f.grid->for_each_interior([&](std::size_t idx, const Index3&) { s += ddot(f.values[idx], g.values[idx]); });
  return f.grid->cell_volume() * s;
}

double inner(const ScalarField& f, const ScalarField& g)
{
  require_same_grid(f.grid, g.grid);
  double s = 0.0;
  f.grid->for_each_interior([&](std::size_t idx, const Index3&) { s += f.values[idx] * g.values[idx]; });
  return f.grid->cell_volume() * s;
}

double inner(const EdgeGradient& f, const EdgeGradient& g)
{
  require_same_grid(f.grid, g.grid);
  double s = 0.0;
  for (int b = 0; b < f.grid->dim(); ++b)
    f.grid->for_each_edge(
        b, [&](std::size_t idx, const Index3&) { s += dot(f.values[b][idx], g.values[b][idx]); });
  return f.grid->cell_volume() * s;
}

double inner(const CellField& f, const CellField& g)
{
  require_same_grid(f.grid, g.grid);
  double s = 0.0;
  f.grid->for_each_cell([&](std::size_t idx, const Index3&) { s += f.values[idx] * g.values[idx]; });
  return f.grid->cell_volume() * s;
}

double norm_l2(const VectorField& f) { return std::sqrt(inner(f, f)); }
double norm_l2(const TensorField& f) { return std::sqrt(inner(f, f)); }
double norm_l2(const EdgeGradient& f) { return std::sqrt(inner(f, f)); }
double norm_l2(const CellField& f) { return std::sqrt(inner(f, f)); }

double norm_h1(const VectorField& f)
{
  const EdgeGradient gf = edge_gradient(f);
  return std::sqrt(inner(f, f) + inner(gf, gf));
}

double max_norm(const VectorField& f)
{
  double m = 0.0;
  f.grid->for_each_interior([&](std::size_t idx, const Index3&) { m = std::max(m, norm(f.values[idx])); });
  return m;
}

}  // namespace qcsim
