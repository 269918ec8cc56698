#include "chemo/grid.hpp"

#include <cmath>
#include <iomanip>
#include <string>

namespace chemo {

Grid::Grid(int dim, int cells) : dim_(dim), cells_(cells) {
  if (dim != 1 && dim != 2)
    throw std::invalid_argument("unsupported dimension " + std::to_string(dim) +
                                " (expected 1 or 2)");
  if (cells < 4)
    throw std::invalid_argument("grid needs at least 4 cells per axis, got " +
                                std::to_string(cells));
  dx_ = 1.0 / cells;
  node_count_ = dim == 1 ? static_cast<std::size_t>(cells)
                         : static_cast<std::size_t>(cells) * cells;
  cell_volume_ = dim == 1 ? dx_ : dx_ * dx_;
}

std::vector<double> Grid::node_coords(std::size_t node) const {
  if (dim_ == 1) return {coord(static_cast<int>(node))};
  const int i = static_cast<int>(node % cells_);
  const int j = static_cast<int>(node / cells_);
  return {coord(i), coord(j)};
}

Grid make_grid(int dim, int cells) { return Grid(dim, cells); }

Field::Field(const Grid& grid, double value)
    : grid_(std::make_shared<const Grid>(grid)),
      values_(grid.node_count(), value) {}

Field::Field(const Grid& grid, std::vector<double> values)
    : grid_(std::make_shared<const Grid>(grid)), values_(std::move(values)) {
  if (values_.size() != grid.node_count())
    throw GridMismatch("field has " + std::to_string(values_.size()) +
                       " values, grid has " +
                       std::to_string(grid.node_count()) + " nodes");
}

bool Field::all_finite() const {
  for (double x : values_)
    if (!std::isfinite(x)) return false;
  return true;
}

bool Field::same_grid(const Field& other) const {
  return grid_ && other.grid_ &&
         (grid_ == other.grid_ || *grid_ == *other.grid_);
}

void require_same_grid(const Field& a, const Field& b) {
  if (!a.same_grid(b)) throw GridMismatch("fields live on different grids");
}

Field& Field::operator+=(const Field& other) {
  require_same_grid(*this, other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

Field& Field::operator-=(const Field& other) {
  require_same_grid(*this, other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

Field& Field::operator*=(double s) {
  for (double& x : values_) x *= s;
  return *this;
}

Field& Field::axpy(double s, const Field& other) {
  require_same_grid(*this, other);
  for (std::size_t i = 0; i < values_.size(); ++i)
    values_[i] += s * other.values_[i];
  return *this;
}

Field operator+(Field a, const Field& b) { return a += b; }
Field operator-(Field a, const Field& b) { return a -= b; }
Field operator*(double s, Field a) { return a *= s; }
Field operator-(Field a) { return a *= -1.0; }

namespace {

void check_on(const Grid& g, const Field& u) {
  if (u.empty() || !(u.grid() == g))
    throw GridMismatch("field does not live on the given grid");
}

}  // namespace

Field laplacian_apply(const Grid& g, const Field& u) {
  check_on(g, u);
  const int n = g.cells();
  const double inv = 1.0 / (g.dx() * g.dx());
  Field out(g);
  if (g.dim() == 1) {
    for (int i = 0; i < n; ++i) {
      const double left = i > 0 ? u[i - 1] : u[i];
      const double right = i < n - 1 ? u[i + 1] : u[i];
      out[i] = (left - 2.0 * u[i] + right) * inv;
    }
    return out;
  }
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const std::size_t c = g.index(i, j);
      const double w = i > 0 ? u[c - 1] : u[c];
      const double e = i < n - 1 ? u[c + 1] : u[c];
      const double s = j > 0 ? u[c - n] : u[c];
      const double nn = j < n - 1 ? u[c + n] : u[c];
      out[c] = (w + e + s + nn - 4.0 * u[c]) * inv;
    }
  }
  return out;
}

Field advective_divergence(const Grid& g, const Field& u, const Field& v) {
  check_on(g, u);
  check_on(g, v);
  const int n = g.cells();
  const double dx = g.dx();
  Field out(g);
  // flux through the face between nodes a and b (b on the + side)
  auto flux = [&](std::size_t a, std::size_t b) {
    return 0.5 * (u[a] + u[b]) * (v[b] - v[a]) / dx;
  };
  if (g.dim() == 1) {
    for (int i = 0; i + 1 < n; ++i) {
      const double f = flux(i, i + 1) / dx;
      out[i] += f;
      out[i + 1] -= f;
    }
    return out;
  }
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const std::size_t c = g.index(i, j);
      if (i + 1 < n) {
        const double f = flux(c, c + 1) / dx;
        out[c] += f;
        out[c + 1] -= f;
      }
      if (j + 1 < n) {
        const double f = flux(c, c + n) / dx;
        out[c] += f;
        out[c + n] -= f;
      }
    }
  }
  return out;
}

double gradient_inner(const Field& u, const Field& w) {
  require_same_grid(u, w);
  const Grid& g = u.grid();
  const int n = g.cells();
  const double inv = 1.0 / (g.dx() * g.dx());
  double sum = 0.0;
  if (g.dim() == 1) {
    for (int i = 0; i + 1 < n; ++i)
      sum += (u[i + 1] - u[i]) * (w[i + 1] - w[i]);
  } else {
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        const std::size_t c = g.index(i, j);
        if (i + 1 < n) sum += (u[c + 1] - u[c]) * (w[c + 1] - w[c]);
        if (j + 1 < n) sum += (u[c + n] - u[c]) * (w[c + n] - w[c]);
      }
    }
  }
  return sum * inv * g.cell_volume();
}

double inner_h(const Field& u, const Field& w) {
  require_same_grid(u, w);
  double sum = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) sum += u[i] * w[i];
  return sum * u.grid().cell_volume();
}

double norm_h(const Field& u) { return std::sqrt(inner_h(u, u)); }

double norm_l4(const Field& u) {
  double sum = 0.0;
  for (double x : u.values()) sum += x * x * x * x;
  return std::pow(sum * u.grid().cell_volume(), 0.25);
}

double seminorm_v(const Field& u) { return std::sqrt(gradient_inner(u, u)); }

double norm_v(const Field& u) {
  return std::sqrt(gradient_inner(u, u) + inner_h(u, u));
}

double mean(const Field& u) {
  double sum = 0.0;
  for (double x : u.values()) sum += x;
  // |Omega| = 1
  return sum * u.grid().cell_volume();
}

double max_abs(const Field& u) {
  double m = 0.0;
  for (double x : u.values()) m = std::max(m, std::abs(x));
  return m;
}

Field subtract_mean(Field u) {
  const double m = mean(u);
  for (double& x : u.values()) x -= m;
  return u;
}

void write_field_csv(std::ostream& os, const Field& u) {
  const Grid& g = u.grid();
  os << (g.dim() == 1 ? "x,value\n" : "x,y,value\n");
  os << std::setprecision(17);
  for (std::size_t k = 0; k < u.size(); ++k) {
    for (double c : g.node_coords(k)) os << c << ',';
    os << u[k] << '\n';
  }
}

}  // namespace chemo
