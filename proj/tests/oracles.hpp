#pragma once

// Independent reference computations used by the tests. Nothing here calls
// the solver paths it checks.

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include "chemo/grid.hpp"

namespace oracle {

using Matrix = std::vector<std::vector<double>>;

/// Gaussian elimination with partial pivoting.
inline std::vector<double> dense_solve(Matrix a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    std::swap(a[c], a[piv]);
    std::swap(b[c], b[piv]);
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = a[r][c] / a[c][c];
      if (f == 0.0) continue;
      for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
      b[r] -= f * b[c];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= a[i][k] * x[k];
    x[i] = s / a[i][i];
  }
  return x;
}

/// Dense Neumann Laplacian built from the graph of grid neighbours.
inline Matrix dense_laplacian(const chemo::Grid& g) {
  const std::size_t N = g.node_count();
  const int n = g.cells();
  const double c = 1.0 / (g.dx() * g.dx());
  Matrix L(N, std::vector<double>(N, 0.0));
  auto link = [&](std::size_t a, std::size_t b) {
    L[a][b] += c;
    L[a][a] -= c;
  };
  for (std::size_t k = 0; k < N; ++k) {
    const int i = static_cast<int>(k % n);
    const int j = static_cast<int>(k / n);
    if (i > 0) link(k, k - 1);
    if (i < n - 1) link(k, k + 1);
    if (g.dim() == 2) {
      if (j > 0) link(k, k - n);
      if (j < n - 1) link(k, k + n);
    }
  }
  return L;
}

inline Matrix identity(std::size_t n) {
  Matrix I(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) I[i][i] = 1.0;
  return I;
}

/// Column-by-column inverse of (I - L).
inline Matrix dense_helmholtz_inverse(const chemo::Grid& g) {
  const std::size_t N = g.node_count();
  Matrix A = dense_laplacian(g);
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) A[i][j] = (i == j ? 1.0 : 0.0) - A[i][j];
  Matrix K(N, std::vector<double>(N));
  for (std::size_t c = 0; c < N; ++c) {
    std::vector<double> e(N, 0.0);
    e[c] = 1.0;
    const auto col = dense_solve(A, e);
    for (std::size_t r = 0; r < N; ++r) K[r][c] = col[r];
  }
  return K;
}

/// Eigenvalue of -Delta_h on cos(k pi x) for the cell-centred mirror grid.
inline double discrete_eigenvalue(int k, double dx) {
  const double s = std::sin(k * std::numbers::pi * dx / 2.0);
  return 4.0 / (dx * dx) * s * s;
}

struct ModeState {
  double a;  // amplitude of u
  double m;  // amplitude of mu
};

/// Scheme restricted to one eigenvector of -Delta_h with eigenvalue kappa,
/// for linear beta, pi = 0, f = 0, eta = 0. From the two step equations
///   (a1 - a0)/h + (m1 - m0) + kappa m1 = 0,
///   m1 = lambda (a1 - a0)/h + (eps kappa + 1) a1,
/// eliminating m1 gives a1 in closed form.
inline std::vector<ModeState> mode_recurrence(double a0, double kappa, double eps,
                                              double lambda, double h, int steps) {
  std::vector<ModeState> out{{a0, 0.0}};
  for (int n = 0; n < steps; ++n) {
    const auto [a, m] = out.back();
    const double lhs = 1.0 / (h * (1.0 + kappa)) + lambda / h + eps * kappa + 1.0;
    const double rhs = m / (1.0 + kappa) + a / (h * (1.0 + kappa)) + lambda * a / h;
    const double a1 = rhs / lhs;
    const double m1 = (m - (a1 - a) / h) / (1.0 + kappa);
    out.push_back({a1, m1});
  }
  return out;
}

/// Decay rate of the cos(pi x) mode for the time-continuous problem with
/// linear beta and continuous eigenvalue kappa.
inline double mode_decay_rate(double kappa, double eps, double lambda) {
  return (kappa + eps * kappa * kappa) / (1.0 + lambda * kappa);
}

/// Closed-form primitive of |r| ln((1+r)/(1-r)).
inline double abs_logit_primitive(double r) {
  const double x = std::abs(r);
  if (x == 1.0) return 1.0;
  return x + 0.5 * (x * x - 1.0) * std::log((1.0 + x) / (1.0 - x));
}

inline chemo::Field random_field(const chemo::Grid& g, std::mt19937_64& rng,
                                 double scale = 1.0) {
  std::normal_distribution<double> d(0.0, scale);
  chemo::Field f(g);
  for (double& x : f.values()) x = d(rng);
  return f;
}

}  // namespace oracle
