#pragma once

#include <cstddef>
#include <memory>
#include <ostream>
#include <span>
#include <stdexcept>
#include <vector>

namespace chemo {

/// Uniform cell-centred grid on the unit box (0,1)^d, d in {1, 2}.
///
/// Nodes sit at cell centres x_i = (i + 1/2) dx. Homogeneous Neumann
/// closure uses mirror ghosts, which makes the discrete Laplacian exactly
/// symmetric with respect to the grid inner product.
class Grid {
 public:
  Grid(int dim, int cells);

  int dim() const { return dim_; }
  int cells() const { return cells_; }
  double dx() const { return dx_; }
  std::size_t node_count() const { return node_count_; }
  /// dx^d, the quadrature weight of one node.
  double cell_volume() const { return cell_volume_; }

  /// Coordinate of node index along one axis.
  double coord(int i) const { return (i + 0.5) * dx_; }
  /// Linear node index for (i, j); j is ignored in 1D.
  std::size_t index(int i, int j = 0) const {
    return static_cast<std::size_t>(j) * cells_ + i;
  }
  std::vector<double> node_coords(std::size_t node) const;

  bool operator==(const Grid& other) const {
    return dim_ == other.dim_ && cells_ == other.cells_;
  }

 private:
  int dim_;
  int cells_;
  double dx_;
  std::size_t node_count_;
  double cell_volume_;
};

Grid make_grid(int dim, int cells);

class GridMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Grid function. Holds a shared handle to its grid so fields can be
/// compared and combined safely.
class Field {
 public:
  Field() = default;
  explicit Field(const Grid& grid, double value = 0.0);
  Field(const Grid& grid, std::vector<double> values);

  const Grid& grid() const { return *grid_; }
  bool empty() const { return grid_ == nullptr; }
  std::size_t size() const { return values_.size(); }

  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }
  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  const std::vector<double>& data() const { return values_; }

  bool all_finite() const;
  bool same_grid(const Field& other) const;

  Field& operator+=(const Field& other);
  Field& operator-=(const Field& other);
  Field& operator*=(double s);
  /// this += s * other
  Field& axpy(double s, const Field& other);

 private:
  std::shared_ptr<const Grid> grid_;
  std::vector<double> values_;
};

Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);
Field operator*(double s, Field a);
Field operator-(Field a);

/// Field sampled from f(x) in 1D or f(x, y) in 2D at the node coordinates.
template <class Fn>
Field sample(const Grid& g, Fn&& fn) {
  Field out(g);
  if (g.dim() == 1) {
    for (int i = 0; i < g.cells(); ++i) out[i] = fn(g.coord(i), 0.0);
  } else {
    for (int j = 0; j < g.cells(); ++j)
      for (int i = 0; i < g.cells(); ++i)
        out[g.index(i, j)] = fn(g.coord(i), g.coord(j));
  }
  return out;
}

void require_same_grid(const Field& a, const Field& b);

// Discrete operators. All are pure.

/// Second-order 3-point / 5-point Laplacian with mirror ghosts.
Field laplacian_apply(const Grid& g, const Field& u);

/// Discrete divergence of face fluxes mean(u) * grad(v) with zero boundary
/// flux. The output has zero mean up to roundoff.
Field advective_divergence(const Grid& g, const Field& u, const Field& v);

/// Face-centred gradient pairing sum_faces (du)(dw)/dx^2 * dx^d.
double gradient_inner(const Field& u, const Field& w);

double inner_h(const Field& u, const Field& w);
double norm_h(const Field& u);
double norm_l4(const Field& u);
double seminorm_v(const Field& u);
double norm_v(const Field& u);
double mean(const Field& u);
double max_abs(const Field& u);

/// u - mean(u)
Field subtract_mean(Field u);

/// One node per row: coordinates then value.
void write_field_csv(std::ostream& os, const Field& u);

}  // namespace chemo
