#include "qcsim/grid.hpp"

#include <cmath>
#include <string>

namespace qcsim {

Grid::Grid(int dim, Index3 n, std::array<double, 3> extent) : dim_(dim), n_(n), extent_(extent)
{
  if (dim != 2 && dim != 3) throw std::invalid_argument("grid dim must be 2 or 3");
  if (dim == 2) {
    n_[2] = 1;
    extent_[2] = 0.0;
  }
  cell_volume_ = 1.0;
  for (int a = 0; a < 3; ++a) {
    if (a < dim_) {
      if (n_[a] < 3) throw std::invalid_argument("grid needs at least 3 interior nodes per axis");
      if (!(extent_[a] > 0.0) || !std::isfinite(extent_[a]))
        throw std::invalid_argument("grid extent must be positive and finite");
      h_[a] = extent_[a] / (n_[a] + 1);
      shape_[a] = n_[a] + 2;
      cell_volume_ *= h_[a];
    } else {
      h_[a] = 0.0;
      shape_[a] = 1;
    }
  }
  stride_ = {1, static_cast<std::size_t>(shape_[0]), static_cast<std::size_t>(shape_[0]) * shape_[1]};
  node_count_ = static_cast<std::size_t>(shape_[0]) * shape_[1] * shape_[2];
  for_each_node([&](std::size_t idx, const Index3& p) {
    if (is_boundary(p)) boundary_nodes_.push_back(idx);
  });
  bc_u_.assign(boundary_nodes_.size(), zero_vec());
  bc_nu_.assign(boundary_nodes_.size(), zero_vec());
}

std::size_t Grid::interior_count() const
{
  std::size_t c = 1;
  for (int a = 0; a < dim_; ++a) c *= static_cast<std::size_t>(n_[a]);
  return c;
}

bool Grid::is_boundary(const Index3& p) const
{
  for (int a = 0; a < dim_; ++a)
    if (p[a] == 0 || p[a] == n_[a] + 1) return true;
  return false;
}

Vec3 Grid::coord(const Index3& p) const { return {p[0] * h_[0], p[1] * h_[1], p[2] * h_[2]}; }

Index3 Grid::unravel(std::size_t idx) const
{
  const int i = static_cast<int>(idx % shape_[0]);
  idx /= shape_[0];
  const int j = static_cast<int>(idx % shape_[1]);
  const int k = static_cast<int>(idx / shape_[1]);
  return {i, j, k};
}

Index3 Grid::lo_interior() const { return {1, 1, dim_ == 3 ? 1 : 0}; }

Index3 Grid::hi_interior() const { return {n_[0], n_[1], dim_ == 3 ? n_[2] : 0}; }

void Grid::set_boundary_data(const FieldFunction& u_bar, const FieldFunction& nu_bar)
{
  for (std::size_t b = 0; b < boundary_nodes_.size(); ++b) {
    const Vec3 x = coord(unravel(boundary_nodes_[b]));
    bc_u_[b] = u_bar ? u_bar(x) : zero_vec();
    bc_nu_[b] = nu_bar ? nu_bar(x) : zero_vec();
  }
}

void Grid::set_boundary_data(std::vector<Vec3> u_bar, std::vector<Vec3> nu_bar)
{
  if (u_bar.size() != boundary_nodes_.size() || nu_bar.size() != boundary_nodes_.size())
    throw std::invalid_argument("boundary data must cover exactly the boundary node set");
  bc_u_ = std::move(u_bar);
  bc_nu_ = std::move(nu_bar);
}

bool Grid::same_layout(const Grid& o) const
{
  return dim_ == o.dim_ && n_ == o.n_ && h_ == o.h_;
}

GridPtr make_grid(int dim, Index3 n, std::array<double, 3> extent, const FieldFunction& u_bar,
                  const FieldFunction& nu_bar)
{
  auto g = std::make_shared<Grid>(dim, n, extent);
  g->set_boundary_data(u_bar, nu_bar);
  return g;
}

void require_same_grid(const GridPtr& a, const GridPtr& b)
{
  if (!a || !b) throw GridMismatch("field is not attached to a grid");
  if (a != b && !a->same_layout(*b)) throw GridMismatch("operands live on different grids");
}

VectorField::VectorField(GridPtr g) : grid(std::move(g)), values(grid->node_count(), zero_vec()) {}

VectorField VectorField::sample(GridPtr g, const FieldFunction& f)
{
  VectorField v(g);
  g->for_each_node([&](std::size_t idx, const Index3& p) { v.values[idx] = f(g->coord(p)); });
  return v;
}

VectorField& VectorField::operator+=(const VectorField& o)
{
  require_same_grid(grid, o.grid);
  for (std::size_t i = 0; i < values.size(); ++i) values[i] += o.values[i];
  return *this;
}

VectorField& VectorField::operator-=(const VectorField& o)
{
  require_same_grid(grid, o.grid);
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = values[i] - o.values[i];
  return *this;
}

VectorField& VectorField::operator*=(double s)
{
  for (auto& v : values) v = s * v;
  return *this;
}

void VectorField::axpy(double s, const VectorField& o)
{
  require_same_grid(grid, o.grid);
  for (std::size_t i = 0; i < values.size(); ++i)
    for (int c = 0; c < 3; ++c) values[i][c] += s * o.values[i][c];
}

void VectorField::zero_boundary()
{
  for (std::size_t idx : grid->boundary_nodes()) values[idx] = zero_vec();
}

void VectorField::set_boundary(const std::vector<Vec3>& data)
{
  const auto& nodes = grid->boundary_nodes();
  if (data.size() != nodes.size()) throw std::invalid_argument("boundary data size mismatch");
  for (std::size_t b = 0; b < nodes.size(); ++b) values[nodes[b]] = data[b];
}

bool VectorField::all_finite() const
{
  for (const auto& v : values)
    for (double c : v)
      if (!std::isfinite(c)) return false;
  return true;
}

VectorField operator+(VectorField a, const VectorField& b) { return a += b; }
VectorField operator-(VectorField a, const VectorField& b) { return a -= b; }
VectorField operator*(double s, VectorField a) { return a *= s; }

ScalarField::ScalarField(GridPtr g) : grid(std::move(g)), values(grid->node_count(), 0.0) {}

TensorField::TensorField(GridPtr g) : grid(std::move(g)), values(grid->node_count(), zero_mat()) {}

EdgeGradient::EdgeGradient(GridPtr g) : grid(std::move(g))
{
  for (int b = 0; b < grid->dim(); ++b) values[b].assign(grid->node_count(), zero_vec());
}

CellField::CellField(GridPtr g) : grid(std::move(g)), values(grid->node_count(), 0.0) {}

}  // namespace qcsim
