#pragma once

#include <array>
#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "chemo/elliptic.hpp"
#include "chemo/scheme.hpp"

namespace chemo {

/// Bounded quantities of the a priori estimates, accumulated over a run.
///   q1  |u_hat_t + h mu_hat_t|^2 in L2(V0*)
///   q2  lambda |u_hat_t|^2 in L2(H)
///   q3  eps |u_bar|^2 in Linf(V)
///   q4  eps h |u_hat_t|^2 in L2(V)
///   q5  |u_bar|^4 in Linf(L4)
///   q6  h |mu_bar|^2 in Linf(H)
///   q7  h^2 |mu_hat_t|^2 in L2(H)
///   q8  |grad mu_bar|^2 in L2(H)
///   q9  |u_hat_t|^2 in L2(V*)
///   q10 eps^2 (|Delta_h u_bar|^2 + |u_bar|_V^2) in L2
///   q11 |beta(u_bar)|^2 in L2(H)
///   q12 |mu_bar|^2 in L2(V)
struct DiagnosticsLedger {
  std::array<double, 12> q{};

  double operator[](int k) const { return q[k - 1]; }  // 1-based
  bool valid() const;
};

DiagnosticsLedger build_ledger(const Trajectory& traj,
                               const SolverOptions& opts = {});

void write_ledger_header(std::ostream& os);
/// One CSV row keyed by (eps, lambda, h, beta family, eta).
void write_ledger_row(std::ostream& os, const Trajectory& traj,
                      const DiagnosticsLedger& ledger);

/// Gap between the two sides of an identity, relative to `scale`.
struct IdentityGap {
  double lhs = 0.0;
  double rhs = 0.0;
  double scale = 0.0;
  double relative() const;
};

struct IdentityReport {
  // worst relative gaps over the run
  double interpolant_l2 = 0.0;     // |u_bar - u_hat|^2 = (h^2/3)|u_hat_t|^2
  double interpolant_jump = 0.0;   // h u_hat_t = u_bar - u_under
  double energy = 0.0;             // per-step energy identity
  double conservation = 0.0;       // per-step mean of (u + h mu) increments
  double global_mean = 0.0;        // mean(u_n + h mu_n) - m0, absolute
  double subdifferential = 0.0;    // most negative slack of the convexity bound
  std::vector<IdentityGap> energy_steps;

  bool passes(double tol) const;
};

/// Per-step energy identity for the step n -> n+1.
IdentityGap energy_identity_gap(const Trajectory& traj, int n);
/// Per-step conservation: mean(delta u + mu_{n+1} - mu_n) = 0.
IdentityGap conservation_gap(const Trajectory& traj, int n);

IdentityReport check_identities(const Trajectory& traj);

struct PtReport {
  double min_pairing = 0.0;
  /// min of pairing / (|Delta_h u|_h |beta_tau(u)|_h)
  double min_normalized = 0.0;
  int trials = 0;
};

/// Evaluates (-Delta_h u, beta_tau(u))_H on random smoothed fields.
PtReport check_pt_inequality(const Grid& g, const BetaSpec& b,
                             const std::vector<double>& taus, int trials,
                             std::uint64_t seed = 42);

struct GrowthBound {
  double c1 = 0.0;
  double c2 = 0.0;
  /// min over the scan of beta_tau(r)(r - m0) - c1 |beta_tau(r)| + c2
  double worst_margin = 0.0;
  bool certified = false;
  int samples = 0;
};

/// Scan-certified constants with beta_tau(r)(r - m0) >= c1|beta_tau(r)| - c2.
GrowthBound check_growth_bound(const BetaSpec& b, double m0, double tau,
                               int samples = 10000);

/// Discrete ceilings of the smoothed initial data over the given eps values:
/// max |u0_eps|_L4^4, max integral beta_hat(u0_eps), max eps |grad u0_eps|^2.
struct InitialDataBounds {
  double l4_pow4 = 0.0;
  double beta_hat_integral = 0.0;
  double eps_gradient = 0.0;
  double max_mean_drift = 0.0;
  double ceiling() const;
};

InitialDataBounds initial_data_bounds(const BetaSpec& b, const Field& u0,
                                      const std::vector<double>& eps_values,
                                      const SolverOptions& opts = {});

}  // namespace chemo
