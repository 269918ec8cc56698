#include "chemo/elliptic.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <sstream>

namespace chemo {

void SolverOptions::validate() const {
  if (!(lin_tol > 0.0) || !(newton_tol > 0.0))
    throw std::invalid_argument("solver tolerances must be positive");
  if (max_newton < 1 || max_cg < 1)
    throw std::invalid_argument("iteration caps must be positive");
  for (std::size_t k = 0; k < tau_factors.size(); ++k) {
    if (!(tau_factors[k] > 0.0))
      throw std::invalid_argument("tau schedule entries must be positive");
    if (k > 0 && !(tau_factors[k] < tau_factors[k - 1]))
      throw std::invalid_argument("tau schedule must be strictly decreasing");
  }
}

namespace {

void check_on(const Grid& g, const Field& u) {
  if (u.empty() || !(u.grid() == g))
    throw GridMismatch("field does not live on the given grid");
}

Field thomas_1d(const Grid& g, const Field& rhs, double alpha, double kappa) {
  const int n = g.cells();
  const double off = -kappa / (g.dx() * g.dx());
  std::vector<double> diag(n), c(n), d(n);
  for (int i = 0; i < n; ++i) {
    const int neighbours = (i > 0) + (i < n - 1);
    diag[i] = alpha - off * neighbours;
  }
  // forward sweep with super-diagonal `off`
  c[0] = off / diag[0];
  d[0] = rhs[0] / diag[0];
  for (int i = 1; i < n; ++i) {
    const double denom = diag[i] - off * c[i - 1];
    c[i] = off / denom;
    d[i] = (rhs[i] - off * d[i - 1]) / denom;
  }
  Field w(g);
  w[n - 1] = d[n - 1];
  for (int i = n - 2; i >= 0; --i) w[i] = d[i] - c[i] * w[i + 1];
  return w;
}

Field apply_shifted(const Grid& g, const Field& w, double alpha, double kappa) {
  Field out = laplacian_apply(g, w);
  out *= -kappa;
  out.axpy(alpha, w);
  return out;
}

double dot(const Field& a, const Field& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void project_mean_zero(Field& u) {
  const double m = mean(u);
  for (double& x : u.values()) x -= m;
}

Field conjugate_gradient(const Grid& g, const Field& rhs, double alpha,
                         double kappa, bool mean_zero, const SolverOptions& opts) {
  Field x(g);
  Field r = rhs;
  if (mean_zero) project_mean_zero(r);
  const double bnorm = std::sqrt(dot(r, r));
  if (bnorm == 0.0) return x;
  Field p = r;
  double rr = dot(r, r);
  for (int it = 0; it < opts.max_cg; ++it) {
    if (std::sqrt(rr) <= opts.lin_tol * bnorm) return x;
    Field ap = apply_shifted(g, p, alpha, kappa);
    const double step = rr / dot(p, ap);
    x.axpy(step, p);
    r.axpy(-step, ap);
    if (mean_zero) {
      project_mean_zero(x);
      project_mean_zero(r);
    }
    const double rr_next = dot(r, r);
    const double beta = rr_next / rr;
    rr = rr_next;
    p *= beta;
    p += r;
  }
  const double rel = std::sqrt(rr) / bnorm;
  if (rel <= opts.lin_tol) return x;
  std::ostringstream os;
  os << "conjugate gradients did not converge in " << opts.max_cg
     << " iterations (relative residual " << rel << ")";
  throw SolverFailure(os.str(), rel);
}

}  // namespace

Field shifted_solve(const Grid& g, const Field& rhs, double alpha, double kappa,
                    const SolverOptions& opts) {
  check_on(g, rhs);
  if (!rhs.all_finite()) throw std::invalid_argument("right-hand side not finite");
  if (!(alpha > 0.0) || kappa < 0.0)
    throw std::invalid_argument("shifted_solve needs alpha > 0, kappa >= 0");
  if (g.dim() == 1) return thomas_1d(g, rhs, alpha, kappa);
  return conjugate_gradient(g, rhs, alpha, kappa, false, opts);
}

Field helmholtz_solve(const Grid& g, const Field& rhs, const SolverOptions& opts) {
  return shifted_solve(g, rhs, 1.0, 1.0, opts);
}

Field neumann_poisson_solve(const Grid& g, const Field& rhs,
                            const SolverOptions& opts) {
  check_on(g, rhs);
  const double m = mean(rhs);
  if (!(std::abs(m) <= 1e-10)) {
    std::ostringstream os;
    os << "Neumann problem needs mean-zero data, mean = " << m;
    throw CompatibilityError(os.str());
  }
  if (g.dim() == 2) return conjugate_gradient(g, rhs, 0.0, 1.0, true, opts);
  // 1D: integrate the zero-flux condition twice.
  const int n = g.cells();
  const double dx = g.dx();
  Field w(g);
  double flux = 0.0;
  for (int i = 0; i + 1 < n; ++i) {
    flux -= dx * (rhs[i] - m);
    w[i + 1] = w[i] + dx * flux;
  }
  return subtract_mean(std::move(w));
}

Field source_potential(const Grid& g, const Field& g_field,
                       const SolverOptions& opts) {
  return neumann_poisson_solve(g, g_field, opts);
}

double vstar_inner(const Grid& g, const Field& r1, const Field& r2,
                   const SolverOptions& opts) {
  return inner_h(r1, helmholtz_solve(g, r2, opts));
}

double vstar_norm(const Grid& g, const Field& r, const SolverOptions& opts) {
  return std::sqrt(std::max(0.0, vstar_inner(g, r, r, opts)));
}

double v0star_norm(const Grid& g, const Field& r, const SolverOptions& opts) {
  return std::sqrt(
      std::max(0.0, inner_h(r, neumann_poisson_solve(g, r, opts))));
}

Field smooth_initial(const Grid& g, const Field& u0, double eps,
                     const SolverOptions& opts) {
  return shifted_solve(g, u0, 1.0, eps, opts);
}

namespace {

// beta_tau and its derivative at r; tau <= 0 selects the exact graph.
struct Slope {
  double value;
  double derivative;
};

Slope nonlinearity_at(const BetaSpec& b, double tau, double r) {
  if (tau <= 0.0) return {beta_eval(b, r), beta_derivative(b, r)};
  if (b.family == BetaFamily::linear)
    return {r / (1.0 + tau), 1.0 / (1.0 + tau)};
  const double j = resolvent(b, tau, r);
  const double d = beta_derivative(b, j);
  return {(r - j) / tau, std::isfinite(d) ? d / (1.0 + tau * d) : 1.0 / tau};
}

void laplacian_triplets(const Grid& g, double scale, int offset_row,
                        int offset_col,
                        std::vector<Eigen::Triplet<double>>& out) {
  const int n = g.cells();
  const double c = scale / (g.dx() * g.dx());
  auto link = [&](int a, int b) {
    out.emplace_back(offset_row + a, offset_col + b, c);
    out.emplace_back(offset_row + a, offset_col + a, -c);
  };
  if (g.dim() == 1) {
    for (int i = 0; i < n; ++i) {
      if (i > 0) link(i, i - 1);
      if (i < n - 1) link(i, i + 1);
    }
    return;
  }
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const int k = static_cast<int>(g.index(i, j));
      if (i > 0) link(k, k - 1);
      if (i < n - 1) link(k, k + 1);
      if (j > 0) link(k, k - n);
      if (j < n - 1) link(k, k + n);
    }
}

class CoupledNewton {
 public:
  CoupledNewton(const Grid& g, const SimParams& params, const BetaSpec& b,
                const PiSpec& p, const Field& rhs, const SolverOptions& opts)
      : g_(g), params_(params), b_(b), p_(p), rhs_(rhs), opts_(opts),
        size_(static_cast<int>(g.node_count())) {
    // constant part of the Jacobian
    const double h = params.h();
    laplacian_triplets(g, -params.eps * h, 0, 0, fixed_);
    laplacian_triplets(g, -1.0, size_, size_, fixed_);
    for (int i = 0; i < size_; ++i) {
      fixed_.emplace_back(i, size_ + i, 1.0);
      fixed_.emplace_back(size_ + i, i, -1.0);
      fixed_.emplace_back(size_ + i, size_ + i, 1.0);
    }
  }

  // Residual blocks; returns sqrt(|R1|_h^2 + |R2|_h^2).
  double residual(double tau, const Field& u, const Field& w, Field& r1,
                  Field& r2) const {
    const double h = params_.h();
    r1 = laplacian_apply(g_, u);
    r1 *= -params_.eps * h;
    for (int i = 0; i < size_; ++i) {
      r1[i] += params_.lambda * u[i] +
               h * nonlinearity_at(b_, tau, u[i]).value +
               h * pi_eval(p_, params_.eps, u[i]) + w[i] - rhs_[i];
    }
    r2 = laplacian_apply(g_, w);
    r2 *= -1.0;
    r2 += w;
    r2 -= u;
    return std::sqrt(inner_h(r1, r1) + inner_h(r2, r2));
  }

  // Newton direction for the current iterate.
  void direction(double tau, const Field& u, const Field& r1, const Field& r2,
                 Field& du, Field& dw) {
    const double h = params_.h();
    std::vector<Eigen::Triplet<double>> trips = fixed_;
    for (int i = 0; i < size_; ++i) {
      const double d = params_.lambda +
                       h * nonlinearity_at(b_, tau, u[i]).derivative +
                       h * pi_derivative(p_, params_.eps, u[i]);
      trips.emplace_back(i, i, d);
    }
    Eigen::SparseMatrix<double> jac(2 * size_, 2 * size_);
    jac.setFromTriplets(trips.begin(), trips.end());
    if (!analyzed_) {
      lu_.analyzePattern(jac);
      analyzed_ = true;
    }
    lu_.factorize(jac);
    if (lu_.info() != Eigen::Success)
      throw SolverFailure("Newton Jacobian factorization failed", 0.0);
    Eigen::VectorXd rhs(2 * size_);
    for (int i = 0; i < size_; ++i) {
      rhs[i] = -r1[i];
      rhs[size_ + i] = -r2[i];
    }
    const Eigen::VectorXd x = lu_.solve(rhs);
    du = Field(g_);
    dw = Field(g_);
    for (int i = 0; i < size_; ++i) {
      du[i] = x[i];
      dw[i] = x[size_ + i];
    }
  }

  // Largest step in (0, 1] keeping u + a du strictly inside D(beta).
  double max_step(double tau, const Field& u, const Field& du) const {
    if (tau > 0.0 || !b_.bounded_domain()) return 1.0;
    double a = 1.0;
    for (int i = 0; i < size_; ++i) {
      if (du[i] > 0.0) a = std::min(a, 0.99 * (b_.domain_hi() - u[i]) / du[i]);
      if (du[i] < 0.0) a = std::min(a, 0.99 * (b_.domain_lo() - u[i]) / du[i]);
    }
    return a;
  }

  // Runs Newton at fixed tau until the residual drops below tol, then
  // polishes while the residual keeps decreasing.
  double solve_stage(double tau, double tol, Field& u, Field& w,
                     std::vector<double>& history, int& iterations) {
    Field r1, r2;
    double res = residual(tau, u, w, r1, r2);
    history.push_back(res);
    bool converged = res <= tol;
    int polish = converged ? 1 : 2;
    for (int it = 0; it < opts_.max_newton; ++it) {
      if (converged && polish == 0) break;
      Field du, dw;
      direction(tau, u, r1, r2, du, dw);
      ++iterations;
      double a = max_step(tau, u, du);
      bool accepted = false;
      while (a > 1e-12) {
        Field ut = u, wt = w;
        ut.axpy(a, du);
        wt.axpy(a, dw);
        if (tau <= 0.0 && b_.bounded_domain()) {
          // rounding can land exactly on the boundary
          const double lo = std::nextafter(b_.domain_lo(), 0.0);
          const double hi = std::nextafter(b_.domain_hi(), 0.0);
          for (double& x : ut.values()) x = std::clamp(x, lo, hi);
        }
        Field t1, t2;
        const double trial = residual(tau, ut, wt, t1, t2);
        if (trial < (1.0 - 1e-4 * a) * res || (converged && trial < res)) {
          u = std::move(ut);
          w = std::move(wt);
          r1 = std::move(t1);
          r2 = std::move(t2);
          res = trial;
          accepted = true;
          break;
        }
        a *= 0.5;
      }
      if (!accepted) {
        if (converged) break;
        history.push_back(res);
        std::ostringstream os;
        os << "Newton stagnated at damping floor (tau = " << tau
           << ", residual " << res << ")";
        throw StepFailure(os.str(), history);
      }
      history.push_back(res);
      if (converged) --polish;
      if (!converged && res <= tol) converged = true;
    }
    if (!converged) {
      std::ostringstream os;
      os << "Newton did not converge in " << opts_.max_newton
         << " iterations (tau = " << tau << ", residual " << res << ")";
      throw StepFailure(os.str(), history);
    }
    return res;
  }

 private:
  const Grid& g_;
  const SimParams& params_;
  const BetaSpec& b_;
  const PiSpec& p_;
  const Field& rhs_;
  const SolverOptions& opts_;
  int size_;
  std::vector<Eigen::Triplet<double>> fixed_;
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu_;
  bool analyzed_ = false;
};

}  // namespace

StepSolution step_solve_detailed(const Grid& g, const SimParams& params,
                                 const BetaSpec& b, const PiSpec& p,
                                 const Field& rhs, const Field& warm,
                                 const SolverOptions& opts) {
  check_on(g, rhs);
  check_on(g, warm);
  params.validate();
  if (!rhs.all_finite()) throw std::invalid_argument("step right-hand side not finite");

  const double h = params.h();
  const double tol = opts.newton_tol * std::max(1.0, norm_h(rhs));
  StepSolution sol;
  Field u = warm;
  if (!u.all_finite()) u = Field(g);
  Field w = helmholtz_solve(g, u, opts);

  CoupledNewton newton(g, params, b, p, rhs, opts);
  double last_tau = h;
  for (double factor : opts.tau_factors) {
    const double tau = factor * h;
    newton.solve_stage(tau, 1e3 * tol, u, w, sol.residual_history,
                       sol.newton_iterations);
    last_tau = tau;
  }
  // Exact-beta polish needs the iterate strictly inside D(beta).
  for (double& x : u.values())
    if (!b.in_domain(x)) x = resolvent(b, last_tau, x);
  sol.residual = newton.solve_stage(0.0, tol, u, w, sol.residual_history,
                                    sol.newton_iterations);
  sol.u = std::move(u);
  return sol;
}

Field step_solve(const Grid& g, const SimParams& params, const BetaSpec& b,
                 const PiSpec& p, const Field& rhs, const Field& warm,
                 const SolverOptions& opts) {
  return step_solve_detailed(g, params, b, p, rhs, warm, opts).u;
}

Field step_operator(const Grid& g, const SimParams& params, const BetaSpec& b,
                    const PiSpec& p, double tau, const Field& u,
                    const SolverOptions& opts) {
  check_on(g, u);
  const double h = params.h();
  Field out = helmholtz_solve(g, u, opts);
  out.axpy(-params.eps * h, laplacian_apply(g, u));
  for (std::size_t i = 0; i < u.size(); ++i) {
    out[i] += params.lambda * u[i] + h * nonlinearity_at(b, tau, u[i]).value +
              h * pi_eval(p, params.eps, u[i]);
  }
  return out;
}

}  // namespace chemo
