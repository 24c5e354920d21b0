#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <memory>
#include <stdexcept>
#include <vector>

#include "qcsim/tensor.hpp"

namespace qcsim {

using Index3 = std::array<int, 3>;
using FieldFunction = std::function<Vec3(const Vec3& x)>;

/// Uniform Cartesian node set on [0, extent_1] x ... with Dirichlet data on
/// the boundary layer. Each axis carries n interior nodes plus the two
/// boundary nodes, so h = extent / (n + 1). On dim = 2 grids the third axis
/// is a single non-boundary layer and every x3-derivative vanishes.
class Grid {
 public:
  Grid(int dim, Index3 n, std::array<double, 3> extent);

  int dim() const { return dim_; }
  const Index3& n() const { return n_; }
  const std::array<double, 3>& h() const { return h_; }
  const std::array<double, 3>& extent() const { return extent_; }

  /// Nodes per axis including the boundary layer.
  const Index3& shape() const { return shape_; }
  std::size_t node_count() const { return node_count_; }
  std::size_t interior_count() const;

  std::size_t index(int i, int j, int k) const
  {
    return static_cast<std::size_t>(i) +
           static_cast<std::size_t>(shape_[0]) * (static_cast<std::size_t>(j) + static_cast<std::size_t>(shape_[1]) * k);
  }
  std::size_t index(const Index3& p) const { return index(p[0], p[1], p[2]); }
  /// Linear offset between neighbours along `axis`.
  std::size_t stride(int axis) const { return stride_[axis]; }

  bool is_boundary(const Index3& p) const;
  Vec3 coord(const Index3& p) const;
  Index3 unravel(std::size_t idx) const;

  /// h1 * h2 (* h3): the quadrature weight of every node, edge and cell.
  double cell_volume() const { return cell_volume_; }

  const std::vector<std::size_t>& boundary_nodes() const { return boundary_nodes_; }
  /// Dirichlet data, parallel to boundary_nodes().
  const std::vector<Vec3>& bc_u() const { return bc_u_; }
  const std::vector<Vec3>& bc_nu() const { return bc_nu_; }
  void set_boundary_data(const FieldFunction& u_bar, const FieldFunction& nu_bar);
  void set_boundary_data(std::vector<Vec3> u_bar, std::vector<Vec3> nu_bar);

  bool same_layout(const Grid& other) const;

  /// Calls f(idx, p) for every interior node in lexicographic storage order.
  template <class F>
  void for_each_interior(F&& f) const
  {
    for_each_box(lo_interior(), hi_interior(), f);
  }

  /// Calls f(idx, p) for every node (boundary included).
  template <class F>
  void for_each_node(F&& f) const
  {
    for_each_box(Index3{0, 0, 0}, Index3{shape_[0] - 1, shape_[1] - 1, shape_[2] - 1}, f);
  }

  /// Edges along `axis` that touch at least one interior node: the lower node
  /// p runs over [0, n] along `axis` and over the interior across it.
  /// Calls f(idx_lower, p_lower).
  template <class F>
  void for_each_edge(int axis, F&& f) const
  {
    Index3 lo = lo_interior();
    Index3 hi = hi_interior();
    lo[axis] = 0;
    hi[axis] = n_[axis];
    for_each_box(lo, hi, f);
  }

  /// Cells indexed by their lower corner, [0, n] along each existing axis.
  template <class F>
  void for_each_cell(F&& f) const
  {
    Index3 lo{0, 0, 0};
    Index3 hi{0, 0, 0};
    for (int a = 0; a < dim_; ++a) hi[a] = n_[a];
    for_each_box(lo, hi, f);
  }

 private:
  Index3 lo_interior() const;
  Index3 hi_interior() const;

  template <class F>
  void for_each_box(const Index3& lo, const Index3& hi, F& f) const
  {
    for (int k = lo[2]; k <= hi[2]; ++k)
      for (int j = lo[1]; j <= hi[1]; ++j)
        for (int i = lo[0]; i <= hi[0]; ++i) f(index(i, j, k), Index3{i, j, k});
  }

  int dim_;
  Index3 n_;
  std::array<double, 3> h_;
  std::array<double, 3> extent_;
  Index3 shape_;
  std::array<std::size_t, 3> stride_;
  std::size_t node_count_;
  double cell_volume_;
  std::vector<std::size_t> boundary_nodes_;
  std::vector<Vec3> bc_u_;
  std::vector<Vec3> bc_nu_;
};

using GridPtr = std::shared_ptr<const Grid>;

/// Builds a grid and samples the boundary data (zero when a function is empty).
GridPtr make_grid(int dim, Index3 n, std::array<double, 3> extent, const FieldFunction& u_bar = {},
                  const FieldFunction& nu_bar = {});

class GridMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

void require_same_grid(const GridPtr& a, const GridPtr& b);

/// 3-component field on every node of a grid ("2.5D" on dim = 2 grids).
struct VectorField {
  GridPtr grid;
  std::vector<Vec3> values;

  VectorField() = default;
  explicit VectorField(GridPtr g);
  static VectorField sample(GridPtr g, const FieldFunction& f);

  Vec3& operator[](std::size_t idx) { return values[idx]; }
  const Vec3& operator[](std::size_t idx) const { return values[idx]; }

  VectorField& operator+=(const VectorField& o);
  VectorField& operator-=(const VectorField& o);
  VectorField& operator*=(double s);
  /// this += s * o
  void axpy(double s, const VectorField& o);

  void zero_boundary();
  /// Overwrites boundary nodes with data parallel to grid->boundary_nodes().
  void set_boundary(const std::vector<Vec3>& data);
  bool all_finite() const;
};

VectorField operator+(VectorField a, const VectorField& b);
VectorField operator-(VectorField a, const VectorField& b);
VectorField operator*(double s, VectorField a);

struct ScalarField {
  GridPtr grid;
  std::vector<double> values;

  ScalarField() = default;
  explicit ScalarField(GridPtr g);
};

/// 3x3 tensor per node (interior entries meaningful, boundary entries zero).
struct TensorField {
  GridPtr grid;
  std::vector<Mat3> values;

  TensorField() = default;
  explicit TensorField(GridPtr g);
};

/// Forward differences on grid edges: per axis b, entry [b][lower node][a]
/// holds d f_a / d x_b on the edge from the lower node to its +b neighbour.
/// Only edges visited by Grid::for_each_edge carry data.
struct EdgeGradient {
  GridPtr grid;
  std::array<std::vector<Vec3>, 3> values;

  EdgeGradient() = default;
  explicit EdgeGradient(GridPtr g);
};

/// Scalar per grid cell, indexed by the cell's lower-corner node.
struct CellField {
  GridPtr grid;
  std::vector<double> values;

  CellField() = default;
  explicit CellField(GridPtr g);
};

}  // namespace qcsim
