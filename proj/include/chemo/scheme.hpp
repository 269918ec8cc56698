#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "chemo/elliptic.hpp"
#include "chemo/grid.hpp"
#include "chemo/nonlinearity.hpp"
#include "chemo/params.hpp"

namespace chemo {

/// Time-dependent source f(t). Either an analytic provider (averaged by
/// midpoint quadrature) or a piecewise-constant series (averaged exactly).
class TimeSource {
 public:
  static TimeSource zero(const Grid& g);
  static TimeSource constant(Field f);
  static TimeSource analytic(std::function<Field(double)> fn);
  /// Value values[k] holds on [starts[k], starts[k+1]); the last value
  /// holds to infinity. starts[0] must be 0.
  static TimeSource piecewise_constant(std::vector<double> starts,
                                       std::vector<Field> values);

  Field at(double t) const;
  bool is_piecewise_constant() const { return !fn_; }
  /// (1/(b-a)) * integral of f over [a, b]; exact for piecewise-constant data.
  Field exact_average(double a, double b) const;

 private:
  std::function<Field(double)> fn_;
  std::vector<double> starts_;
  std::vector<Field> values_;
};

/// f_k = (1/h) * integral of f over ((k-1)h, kh), k = 1..N.
std::vector<Field> average_sources(const TimeSource& f, const SimParams& params);

struct StepState {
  int n = 0;
  Field u;
  Field mu;
  Field v;  // (I - Delta_h)^{-1} u
};

struct Trajectory {
  SimParams params;
  BetaSpec beta;
  PiSpec pi;
  std::vector<StepState> states;  // n = 0..N
  std::vector<Field> sources;     // f_1..f_N
  std::vector<double> step_residuals;

  const Grid& grid() const { return states.front().u.grid(); }
  double h() const { return params.h(); }
  double time(int n) const { return n * params.h(); }
};

class RunFailure : public std::runtime_error {
 public:
  RunFailure(const std::string& what, int step, Trajectory partial)
      : std::runtime_error(what), step_index(step), partial(std::move(partial)) {}
  int step_index;
  Trajectory partial;
};

/// One step of the scheme: the per-step nonlinear equation for u_{n+1},
/// then the Helmholtz update for mu_{n+1} and v_{n+1}.
StepState step(const StepState& prev, const Field& f_next,
               const SimParams& params, const BetaSpec& b, const PiSpec& p,
               const SolverOptions& opts = {},
               double* residual_out = nullptr);

struct Scenario {
  SimParams params;
  BetaSpec beta;
  PiSpec pi;
  Field u0;
  /// Replace u0 by (I - eps Delta_h)^{-1} u0 before marching.
  bool smooth_initial = true;
  std::optional<TimeSource> source;  // zero when empty
};

/// Initial datum actually used: u0 or its smoothing.
Field initial_datum(const Scenario& s, const SolverOptions& opts = {});

Trajectory run(const Scenario& scenario, const SolverOptions& opts = {});

/// Evaluation of the piecewise-in-time reconstructions of a trajectory.
class InterpolantView {
 public:
  explicit InterpolantView(const Trajectory& traj);

  double T() const { return traj_->params.T; }
  int steps() const { return traj_->params.N; }

  /// Subinterval index containing t; t = T maps to the last interval.
  int interval(double t) const;

  Field u_hat(double t) const;    // piecewise linear
  Field u_bar(double t) const;    // u_{n+1} on (nh, (n+1)h)
  Field u_under(double t) const;  // u_n on (nh, (n+1)h)
  Field u_hat_t(double t) const;  // (u_{n+1} - u_n)/h
  Field mu_hat(double t) const;
  Field mu_bar(double t) const;
  Field mu_hat_t(double t) const;
  Field f_bar(double t) const;

  // Time norms, computed from the piecewise structure.
  /// |u_hat_t|^2 in L^2(0,T;H)
  double u_hat_t_l2h_sq() const;
  /// |u_bar - u_hat|^2 in L^2(0,T;H), by two-point Gauss quadrature per
  /// subinterval (exact for the quadratic integrand).
  double u_bar_minus_hat_l2h_sq() const;
  /// sup over t of |u_hat(t)|_V; attained at the nodes.
  double u_hat_linf_v() const;
  double u_bar_linf_v() const;
  double u_hat_linf_l4() const;
  double u_bar_linf_l4() const;
  double mu_hat_linf_h() const;
  double mu_bar_linf_h() const;

 private:
  void require_time(double t) const;
  const Trajectory* traj_;
};

}  // namespace chemo
