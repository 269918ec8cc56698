#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "chemo/grid.hpp"
#include "chemo/nonlinearity.hpp"
#include "chemo/params.hpp"

namespace chemo {

struct SolverOptions {
  double lin_tol = 1e-11;     // relative residual for CG solves
  double newton_tol = 1e-10;  // nonlinear residual, scaled by max(1, |rhs|)
  int max_newton = 50;
  int max_cg = 20000;
  /// Yosida parameters for continuation, as multiples of h; strictly
  /// decreasing. The exact beta is used after the last entry.
  std::vector<double> tau_factors{1e-2, 1e-4, 1e-6};

  void validate() const;
};

class SolverFailure : public std::runtime_error {
 public:
  SolverFailure(const std::string& what, double residual)
      : std::runtime_error(what), residual(residual) {}
  double residual;
};

class CompatibilityError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class StepFailure : public std::runtime_error {
 public:
  StepFailure(const std::string& what, std::vector<double> history)
      : std::runtime_error(what), residual_history(std::move(history)) {}
  std::vector<double> residual_history;
};

/// Solves (alpha I - kappa Delta_h) w = rhs. Direct tridiagonal solve in 1D,
/// conjugate gradients in 2D.
Field shifted_solve(const Grid& g, const Field& rhs, double alpha, double kappa,
                    const SolverOptions& opts = {});

/// K rhs with K = (I - Delta_h)^{-1}.
Field helmholtz_solve(const Grid& g, const Field& rhs,
                      const SolverOptions& opts = {});

/// Mean-zero w with -Delta_h w = rhs. Requires |mean(rhs)| <= 1e-10.
Field neumann_poisson_solve(const Grid& g, const Field& rhs,
                            const SolverOptions& opts = {});

/// Mean-zero f with -Delta_h f = g and zero Neumann data.
Field source_potential(const Grid& g, const Field& g_field,
                       const SolverOptions& opts = {});

double vstar_norm(const Grid& g, const Field& r, const SolverOptions& opts = {});
/// (r1, r2)_{V*} = (r1, K r2)_H
double vstar_inner(const Grid& g, const Field& r1, const Field& r2,
                   const SolverOptions& opts = {});
double v0star_norm(const Grid& g, const Field& r, const SolverOptions& opts = {});

/// u0_eps = (I - eps Delta_h)^{-1} u0; preserves the mean.
Field smooth_initial(const Grid& g, const Field& u0, double eps,
                     const SolverOptions& opts = {});

/// Left-hand operator of the per-step equation with the Yosida
/// approximation beta_tau (tau <= 0 selects the exact beta):
///   (lambda + K) u - eps h Delta_h u + h beta_tau(u) + h pi_eps(u).
Field step_operator(const Grid& g, const SimParams& params, const BetaSpec& b,
                    const PiSpec& p, double tau, const Field& u,
                    const SolverOptions& opts = {});

struct StepSolution {
  Field u;
  double residual = 0.0;  // final |R|_h over both blocks
  int newton_iterations = 0;
  std::vector<double> residual_history;
};

/// Solves (lambda + K) u - eps h Delta_h u + h beta(u) + h pi_eps(u) = rhs
/// by damped Newton on the coupled sparse system for (u, w = K u), with
/// Yosida continuation before the exact-beta polish.
StepSolution step_solve_detailed(const Grid& g, const SimParams& params,
                                 const BetaSpec& b, const PiSpec& p,
                                 const Field& rhs, const Field& warm,
                                 const SolverOptions& opts = {});

Field step_solve(const Grid& g, const SimParams& params, const BetaSpec& b,
                 const PiSpec& p, const Field& rhs, const Field& warm,
                 const SolverOptions& opts = {});

}  // namespace chemo
