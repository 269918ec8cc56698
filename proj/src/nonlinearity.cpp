#include "chemo/nonlinearity.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

namespace chemo {

std::string to_string(BetaFamily f) {
  switch (f) {
    case BetaFamily::linear: return "linear";
    case BetaFamily::power: return "power";
    case BetaFamily::logit: return "logit";
    case BetaFamily::abs_logit: return "abs_logit";
  }
  return "?";
}

BetaFamily beta_family_from_string(const std::string& name) {
  if (name == "linear") return BetaFamily::linear;
  if (name == "power") return BetaFamily::power;
  if (name == "logit") return BetaFamily::logit;
  if (name == "abs_logit") return BetaFamily::abs_logit;
  throw std::invalid_argument("unknown beta family '" + name + "'");
}

std::string to_string(PiFamily f) {
  return f == PiFamily::zero ? "zero" : "tanh_decay";
}

PiFamily pi_family_from_string(const std::string& name) {
  if (name == "zero") return PiFamily::zero;
  if (name == "tanh_decay") return PiFamily::tanh_decay;
  throw std::invalid_argument("unknown pi family '" + name + "'");
}

double BetaSpec::domain_lo() const {
  return bounded_domain() ? -1.0 : -std::numeric_limits<double>::infinity();
}

double BetaSpec::domain_hi() const {
  return bounded_domain() ? 1.0 : std::numeric_limits<double>::infinity();
}

BetaSpec linear_beta() { return {BetaFamily::linear, 1.0, 0.5, 0.5}; }

BetaSpec power_beta(double m) {
  const double c = 1.0 / (m + 1.0);
  return {BetaFamily::power, m, c, m == 3.0 ? 0.0 : c};
}

BetaSpec logit_beta(double c1, double c2) {
  return {BetaFamily::logit, 1.0, c1, c2};
}

BetaSpec abs_logit_beta(double c1, double c2) {
  return {BetaFamily::abs_logit, 1.0, c1, c2};
}

namespace {

void require_domain(const BetaSpec& b, double r) {
  if (!b.in_domain(r)) {
    std::ostringstream os;
    os << "r = " << r << " outside D(beta) for family " << to_string(b.family);
    throw DomainError(os.str(), r);
  }
}

double logit(double r) { return std::log1p(r) - std::log1p(-r); }

double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

double abs_logit_beta_value(double r) { return std::abs(r) * logit(r); }

double simpson(double a, double b, double fa, double fm, double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

template <class Fn>
double adaptive_simpson(const Fn& f, double a, double b, double fa, double fm,
                        double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = simpson(a, m, fa, flm, fm);
  const double right = simpson(m, b, fm, frm, fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;
  return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

template <class Fn>
double integrate(const Fn& f, double a, double b, double tol) {
  if (a == b) return 0.0;
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  return adaptive_simpson(f, a, b, fa, fm, fb, simpson(a, b, fa, fm, fb), tol,
                          50);
}

constexpr int kAbsLogitTableSize = 1024;

// beta_hat of the abs_logit family at r_k = k / kAbsLogitTableSize.
const std::array<double, kAbsLogitTableSize>& abs_logit_table() {
  static const auto table = [] {
    std::array<double, kAbsLogitTableSize> t{};
    for (int k = 1; k < kAbsLogitTableSize; ++k) {
      const double a = double(k - 1) / kAbsLogitTableSize;
      const double b = double(k) / kAbsLogitTableSize;
      t[k] = t[k - 1] + integrate(abs_logit_beta_value, a, b, 1e-17);
    }
    return t;
  }();
  return table;
}

double abs_logit_beta_hat(double r) {
  const double x = std::abs(r);
  if (x >= 1.0) return 1.0;  // limit of the primitive at the boundary
  const auto& table = abs_logit_table();
  const int k = std::min(static_cast<int>(x * kAbsLogitTableSize),
                         kAbsLogitTableSize - 1);
  const double a = double(k) / kAbsLogitTableSize;
  return table[k] + integrate(abs_logit_beta_value, a, x, 1e-17);
}

}  // namespace

double beta_eval(const BetaSpec& b, double r) {
  require_domain(b, r);
  switch (b.family) {
    case BetaFamily::linear: return r;
    case BetaFamily::power: return r * std::pow(std::abs(r), b.m - 1.0);
    case BetaFamily::logit: return logit(r);
    case BetaFamily::abs_logit: return abs_logit_beta_value(r);
  }
  return 0.0;
}

double beta_derivative(const BetaSpec& b, double r) {
  require_domain(b, r);
  switch (b.family) {
    case BetaFamily::linear: return 1.0;
    case BetaFamily::power: return b.m * std::pow(std::abs(r), b.m - 1.0);
    case BetaFamily::logit: return 2.0 / ((1.0 - r) * (1.0 + r));
    case BetaFamily::abs_logit:
      return (r < 0 ? -1.0 : 1.0) * logit(r) +
             std::abs(r) * 2.0 / ((1.0 - r) * (1.0 + r));
  }
  return 0.0;
}

double beta_hat_eval(const BetaSpec& b, double r) {
  switch (b.family) {
    case BetaFamily::linear: return 0.5 * r * r;
    case BetaFamily::power: return std::pow(std::abs(r), b.m + 1.0) / (b.m + 1.0);
    case BetaFamily::logit:
      // D(beta_hat) = [-1, 1] is closed
      if (std::abs(r) > 1.0) break;
      return xlogx(1.0 + r) + xlogx(1.0 - r);
    case BetaFamily::abs_logit:
      if (std::abs(r) > 1.0) break;
      return abs_logit_beta_hat(r);
  }
  std::ostringstream os;
  os << "beta_hat(" << r << ") is +infinity for family " << to_string(b.family);
  throw DomainError(os.str(), r);
}

double resolvent(const BetaSpec& b, double tau, double s,
                 ResolventMethod method) {
  if (!(tau > 0.0)) throw std::invalid_argument("resolvent needs tau > 0");
  if (s == 0.0) return 0.0;
  if (b.family == BetaFamily::linear) {
    if (method == ResolventMethod::newton) return s / (1.0 + tau);
  }
  // The root lies between 0 and s (sign(r) = sign(s), |r| <= |s|).
  double lo = std::min(0.0, s), hi = std::max(0.0, s);
  if (b.bounded_domain()) {
    lo = std::max(lo, std::nextafter(-1.0, 0.0));
    hi = std::min(hi, std::nextafter(1.0, 0.0));
  }
  auto residual = [&](double r) { return r + tau * beta_eval(b, r) - s; };
  double f_lo = residual(lo), f_hi = residual(hi);
  // Clamped bracket: the root sits beyond the representable interior.
  if (f_lo > 0.0) return lo;
  if (f_hi < 0.0) return hi;

  if (method == ResolventMethod::bisection) {
    for (int it = 0; it < 4000; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      const double fm = residual(mid);
      if (fm == 0.0) return mid;
      if (fm < 0.0) lo = mid, f_lo = fm;
      else hi = mid, f_hi = fm;
    }
    return std::abs(f_lo) <= std::abs(f_hi) ? lo : hi;
  }

  const double tol = 1e-13 * std::max(1.0, std::abs(s));
  const double lo0 = lo, hi0 = hi;
  double r = s > 0 ? hi : lo;
  if (b.bounded_domain()) r = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    const double f = residual(r);
    if (f == 0.0) return r;
    const double df = 1.0 + tau * beta_derivative(b, r);
    double next = r - f / df;
    if (std::abs(f) <= tol) {
      // one extra Newton step once the residual test passes
      if (next >= lo0 && next <= hi0 && std::abs(residual(next)) <= std::abs(f)) return next;
      return r;
    }
    if (f < 0.0) lo = r;
    else hi = r;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next <= lo || next >= hi) break;
    r = next;
  }
  return r;
}

double yosida(const BetaSpec& b, double tau, double r) {
  if (b.family == BetaFamily::linear) return r / (1.0 + tau);
  return (r - resolvent(b, tau, r)) / tau;
}

double yosida_derivative(const BetaSpec& b, double tau, double r) {
  const double j = resolvent(b, tau, r);
  const double d = beta_derivative(b, j);
  if (!std::isfinite(d)) return 1.0 / tau;
  return d / (1.0 + tau * d);
}

double pi_eval(const PiSpec& p, double eps, double r) {
  if (p.family == PiFamily::zero) return 0.0;
  return -(0.5 * p.c3 * eps) * std::tanh(r);
}

double pi_derivative(const PiSpec& p, double eps, double r) {
  if (p.family == PiFamily::zero) return 0.0;
  const double c = std::cosh(r);
  return -(0.5 * p.c3 * eps) / (c * c);
}

Field apply_beta(const BetaSpec& b, const Field& u) {
  Field out = u;
  for (double& x : out.values()) x = beta_eval(b, x);
  return out;
}

Field apply_yosida(const BetaSpec& b, double tau, const Field& u) {
  Field out = u;
  for (double& x : out.values()) x = yosida(b, tau, x);
  return out;
}

Field apply_pi(const PiSpec& p, double eps, const Field& u) {
  Field out = u;
  for (double& x : out.values()) x = pi_eval(p, eps, x);
  return out;
}

double integral_beta_hat(const BetaSpec& b, const Field& u) {
  double sum = 0.0;
  for (double x : u.values()) sum += beta_hat_eval(b, x);
  return sum * u.grid().cell_volume();
}

bool ValidationReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const AssumptionCheck& c) { return c.passed; });
}

const AssumptionCheck& ValidationReport::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return c;
  throw std::out_of_range("no check named " + name);
}

namespace {

// Sample points of D(beta): the open interval for bounded domains, [-8, 8]
// otherwise.
std::vector<double> domain_samples(const BetaSpec& b, int count) {
  const double lo = b.bounded_domain() ? -1.0 : -8.0;
  const double hi = b.bounded_domain() ? 1.0 : 8.0;
  std::vector<double> r(count);
  for (int k = 0; k < count; ++k)
    r[k] = lo + (hi - lo) * (k + 0.5) / count;
  return r;
}

AssumptionCheck check_a1(const BetaSpec& b) {
  AssumptionCheck c;
  c.name = "A1";
  if (b.family == BetaFamily::power && b.m < 3.0) {
    c.detail = "power exponent m must be >= 3";
    return c;
  }
  const auto rs = domain_samples(b, 2000);
  double worst = std::numeric_limits<double>::infinity();
  double where = 0.0;
  auto record = [&](double margin, double r) {
    if (margin < worst) worst = margin, where = r;
  };
  record(-std::abs(beta_eval(b, 0.0)), 0.0);
  record(-std::abs(beta_hat_eval(b, 0.0)), 0.0);
  for (std::size_t k = 0; k < rs.size(); ++k) {
    const double r = rs[k];
    const double bh = beta_hat_eval(b, r);
    record(bh, r);  // beta_hat >= 0
    if (k + 1 < rs.size()) record(beta_eval(b, rs[k + 1]) - beta_eval(b, r), r);
    // beta_hat' = beta by central differences
    const double step = 1e-6 * std::min(1.0, 1.0 - std::abs(r) + 1e-3);
    if (b.in_domain(r - step) && b.in_domain(r + step)) {
      const double fd =
          (beta_hat_eval(b, r + step) - beta_hat_eval(b, r - step)) / (2 * step);
      const double beta = beta_eval(b, r);
      const double scale = 1e-5 * std::max(1.0, std::abs(beta));
      record(scale - std::abs(fd - beta), r);
    }
    // midpoint convexity
    if (k + 2 < rs.size()) {
      const double mid = beta_hat_eval(b, rs[k + 1]);
      const double chord = 0.5 * (bh + beta_hat_eval(b, rs[k + 2]));
      record(chord - mid + 1e-12 * std::max(1.0, std::abs(mid)), rs[k + 1]);
    }
  }
  c.passed = worst >= 0.0;
  c.witness = where;
  c.margin = worst;
  c.detail = "beta monotone, beta(0) = 0, beta_hat convex with beta_hat' = beta";
  return c;
}

AssumptionCheck check_a2(const BetaSpec& b) {
  AssumptionCheck c;
  c.name = "A2";
  if (!(b.c1 > 0.0) || b.c2 < 0.0) {
    c.detail = "need c1 > 0 and c2 >= 0";
    return c;
  }
  double worst = std::numeric_limits<double>::infinity(), where = 0.0;
  for (double r : domain_samples(b, 10000)) {
    const double bh = beta_hat_eval(b, r);
    const double margin =
        bh - (b.c1 * r * r * r * r - b.c2) + 1e-12 * std::max(1.0, std::abs(bh));
    if (margin < worst) worst = margin, where = r;
  }
  c.passed = worst >= 0.0;
  c.witness = where;
  c.margin = worst;
  c.detail = "beta_hat(r) >= c1 r^4 - c2 on 10^4 samples";
  return c;
}

AssumptionCheck check_a3(const std::vector<Field>& g_probe) {
  AssumptionCheck c;
  c.name = "A3";
  double worst = 0.0, where = -1.0;
  for (std::size_t k = 0; k < g_probe.size(); ++k) {
    const double m = std::abs(mean(g_probe[k]));
    if (!g_probe[k].all_finite()) {
      worst = std::numeric_limits<double>::infinity();
      where = double(k);
      break;
    }
    if (m > worst) worst = m, where = double(k);
  }
  c.margin = 1e-12 - worst;
  c.witness = where;
  c.passed = c.margin >= 0.0;
  c.detail = "|mean(g(t_k))| <= 1e-12 for " + std::to_string(g_probe.size()) +
             " probe(s)";
  return c;
}

AssumptionCheck check_a4(const PiSpec& p, const std::vector<double>& eps_probe) {
  AssumptionCheck c;
  c.name = "A4";
  if (p.family == PiFamily::tanh_decay && !(p.c3 > 0.0)) {
    c.detail = "tanh_decay needs c3 > 0";
    return c;
  }
  double worst = std::numeric_limits<double>::infinity(), where = 0.0;
  for (double eps : eps_probe) {
    double lip = 0.0;
    bool anti_monotone = true;
    double prev = pi_eval(p, eps, -20.0);
    for (int k = 0; k <= 4000; ++k) {
      const double r = -20.0 + 40.0 * k / 4000.0;
      lip = std::max(lip, std::abs(pi_derivative(p, eps, r)));
      const double cur = pi_eval(p, eps, r);
      if (cur > prev) anti_monotone = false;
      prev = cur;
    }
    const double budget = std::abs(pi_eval(p, eps, 0.0)) + lip;
    double margin = p.c3 * eps - budget;
    if (!anti_monotone) margin = -1.0;
    if (margin < worst) worst = margin, where = eps;
  }
  c.passed = worst >= 0.0;
  c.witness = where;
  c.margin = worst;
  c.detail = "|pi_eps(0)| + sup|pi_eps'| <= c3 eps, pi_eps nonincreasing";
  return c;
}

AssumptionCheck check_a5(const BetaSpec& b, const Field& u0) {
  AssumptionCheck c;
  c.name = "A5";
  const double m0 = mean(u0);
  c.witness = m0;
  if (!u0.all_finite()) {
    c.detail = "u0 has non-finite entries";
    c.margin = -1.0;
    return c;
  }
  c.margin = std::min(m0 - b.domain_lo(), b.domain_hi() - m0);
  if (!(c.margin > 0.0)) {
    std::ostringstream os;
    os << "m0 = " << m0 << " not interior to D(beta)";
    c.detail = os.str();
    return c;
  }
  for (std::size_t k = 0; k < u0.size(); ++k) {
    const double x = u0[k];
    if (b.bounded_domain() && std::abs(x) > 1.0) {
      std::ostringstream os;
      os << "beta_hat(u0) infinite at node " << k << " (u0 = " << x << ")";
      c.detail = os.str();
      c.margin = 1.0 - std::abs(x);
      c.witness = x;
      return c;
    }
  }
  c.passed = true;
  std::ostringstream os;
  os << "m0 = " << m0 << " interior, integral beta_hat(u0) = "
     << integral_beta_hat(b, u0);
  c.detail = os.str();
  return c;
}

}  // namespace

ValidationReport validate_assumptions(const BetaSpec& b, const PiSpec& p,
                                      const Field& u0,
                                      const std::vector<Field>& g_probe,
                                      const std::vector<double>& eps_probe) {
  ValidationReport report;
  report.checks.push_back(check_a1(b));
  report.checks.push_back(check_a2(b));
  report.checks.push_back(check_a3(g_probe));
  report.checks.push_back(check_a4(p, eps_probe));
  report.checks.push_back(check_a5(b, u0));
  return report;
}

}  // namespace chemo
