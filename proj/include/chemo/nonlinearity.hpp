#pragma once

#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "chemo/grid.hpp"

namespace chemo {

enum class BetaFamily { linear, power, logit, abs_logit };

std::string to_string(BetaFamily f);
BetaFamily beta_family_from_string(const std::string& name);

/// Single-valued maximal monotone graph beta together with its convex
/// primitive and the growth constants of the quartic lower bound
/// beta_hat(r) >= c1 r^4 - c2.
struct BetaSpec {
  BetaFamily family = BetaFamily::power;
  double m = 3.0;  // power exponent, m >= 3
  double c1 = 0.25;
  double c2 = 0.0;

  /// Open effective domain (lo, hi).
  double domain_lo() const;
  double domain_hi() const;
  bool in_domain(double r) const { return r > domain_lo() && r < domain_hi(); }
  bool bounded_domain() const {
    return family == BetaFamily::logit || family == BetaFamily::abs_logit;
  }
};

BetaSpec linear_beta();
/// Growth constants default to c1 = 1/(m+1) and c2 = 0 for m = 3, else
/// c2 = 1/(m+1).
BetaSpec power_beta(double m = 3.0);
BetaSpec logit_beta(double c1 = 0.25, double c2 = 1.0);
BetaSpec abs_logit_beta(double c1 = 0.25, double c2 = 1.0);

class DomainError : public std::domain_error {
 public:
  DomainError(const std::string& what, double r)
      : std::domain_error(what), value(r) {}
  double value;
};

double beta_eval(const BetaSpec& b, double r);
/// beta'(r); finite on the open domain.
double beta_derivative(const BetaSpec& b, double r);
double beta_hat_eval(const BetaSpec& b, double r);

enum class ResolventMethod { newton, bisection };

/// J_tau(s) = (I + tau beta)^{-1}(s): the unique r in D(beta) with
/// r + tau beta(r) = s.
double resolvent(const BetaSpec& b, double tau, double s,
                 ResolventMethod method = ResolventMethod::newton);

/// Yosida approximation (s - J_tau(s)) / tau, defined on all of R.
double yosida(const BetaSpec& b, double tau, double r);
/// d/dr of the Yosida approximation: beta'(J)/(1 + tau beta'(J)).
double yosida_derivative(const BetaSpec& b, double tau, double r);

enum class PiFamily { zero, tanh_decay };

std::string to_string(PiFamily f);
PiFamily pi_family_from_string(const std::string& name);

/// Anti-monotone Lipschitz perturbation pi_eps with
/// |pi_eps(0)| + sup |pi_eps'| <= c3 eps.
struct PiSpec {
  PiFamily family = PiFamily::zero;
  double c3 = 0.0;
};

double pi_eval(const PiSpec& p, double eps, double r);
double pi_derivative(const PiSpec& p, double eps, double r);

// Nodewise application.
Field apply_beta(const BetaSpec& b, const Field& u);
Field apply_yosida(const BetaSpec& b, double tau, const Field& u);
Field apply_pi(const PiSpec& p, double eps, const Field& u);
/// Integral of beta_hat(u) over the domain.
double integral_beta_hat(const BetaSpec& b, const Field& u);

struct AssumptionCheck {
  std::string name;
  bool passed = false;
  std::string detail;
  /// Location of the worst sample and the margin there (negative on failure).
  double witness = std::numeric_limits<double>::quiet_NaN();
  double margin = std::numeric_limits<double>::quiet_NaN();
};

struct ValidationReport {
  std::vector<AssumptionCheck> checks;
  bool all_passed() const;
  const AssumptionCheck& find(const std::string& name) const;
};

/// Machine-checks (A1)-(A5) style assumptions. Failures become report
/// entries, never exceptions. `eps_probe` are the eps values at which the
/// pi budget is sampled.
ValidationReport validate_assumptions(const BetaSpec& b, const PiSpec& p,
                                      const Field& u0,
                                      const std::vector<Field>& g_probe,
                                      const std::vector<double>& eps_probe = {
                                          1.0, 0.5, 0.1, 0.01});

}  // namespace chemo
