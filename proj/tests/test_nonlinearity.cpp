#include <doctest.h>

#include <cmath>
#include <random>

#include "chemo/nonlinearity.hpp"
#include "oracles.hpp"

using namespace chemo;

namespace {

std::vector<BetaSpec> all_families() {
  return {linear_beta(), power_beta(3.0), power_beta(5.0), logit_beta(),
          abs_logit_beta()};
}

double sample_in_domain(const BetaSpec& b, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  return b.bounded_domain() ? 0.999 * u(rng) : 4.0 * u(rng);
}

}  // namespace

TEST_CASE("beta and beta_hat closed forms") {
  CHECK(beta_eval(linear_beta(), 2.0) == 2.0);
  CHECK(beta_hat_eval(linear_beta(), 2.0) == 2.0);
  CHECK(beta_eval(power_beta(3), -2.0) == doctest::Approx(-8.0));
  CHECK(beta_hat_eval(power_beta(3), -2.0) == doctest::Approx(4.0));
  CHECK(beta_eval(logit_beta(), 0.5) == doctest::Approx(std::log(3.0)));
  CHECK(beta_eval(logit_beta(), 0.5) >= 8.0 / 3.0 * 0.125);
  CHECK(beta_hat_eval(logit_beta(), 1.0) == doctest::Approx(2.0 * std::log(2.0)));
  CHECK_THROWS_AS(beta_eval(logit_beta(), 1.0), DomainError);
  CHECK_THROWS_AS(beta_eval(abs_logit_beta(), -1.5), DomainError);
  CHECK_THROWS_AS(beta_hat_eval(logit_beta(), 1.5), DomainError);
}

TEST_CASE("abs_logit primitive by quadrature matches the closed form") {
  for (double r : {-0.999, -0.7, -0.3, 0.0, 1e-4, 0.25, 0.5, 0.9, 0.99999}) {
    CHECK(beta_hat_eval(abs_logit_beta(), r) ==
          doctest::Approx(oracle::abs_logit_primitive(r)).epsilon(1e-12));
  }
}

TEST_CASE("beta_hat' = beta by finite differences") {
  std::mt19937_64 rng(5);
  for (const auto& b : all_families()) {
    for (int t = 0; t < 200; ++t) {
      const double r = sample_in_domain(b, rng);
      const double s = 1e-6;
      const double fd = (beta_hat_eval(b, r + s) - beta_hat_eval(b, r - s)) / (2 * s);
      CHECK(fd == doctest::Approx(beta_eval(b, r)).epsilon(1e-6).scale(1.0));
    }
  }
}

TEST_CASE("resolvent examples") {
  CHECK(resolvent(linear_beta(), 1.0, 1.0) == doctest::Approx(0.5));
  CHECK(resolvent(power_beta(3), 1.0, 2.0) == doctest::Approx(1.0));
  CHECK(resolvent(logit_beta(), 0.5, 0.0) == 0.0);
  CHECK_THROWS_AS(resolvent(linear_beta(), 0.0, 1.0), std::invalid_argument);
  // large data keeps the logit resolvent strictly inside (-1, 1)
  const double r = resolvent(logit_beta(), 1e-3, 50.0);
  CHECK(r < 1.0);
  CHECK(r > 0.99);
}

TEST_CASE("yosida examples") {
  for (const auto& b : all_families()) CHECK(yosida(b, 0.3, 0.0) == 0.0);
  CHECK(yosida(linear_beta(), 1.0, 3.0) == doctest::Approx(1.5));
  const BetaSpec p3 = power_beta(3);
  const double y = yosida(p3, 0.01, 0.5);
  CHECK(std::abs(y - 0.125) <= 0.01 * 0.125);
  CHECK(std::abs(y) <= 0.125);
  // convergence as tau decreases
  double prev = std::abs(yosida(p3, 1.0, 0.5) - 0.125);
  for (double tau : {1e-1, 1e-2, 1e-3, 1e-4}) {
    const double err = std::abs(yosida(p3, tau, 0.5) - 0.125);
    CHECK(err < prev);
    prev = err;
  }
  // defined outside a bounded domain
  CHECK(std::isfinite(yosida(logit_beta(), 0.1, 3.0)));
  CHECK(yosida(logit_beta(), 0.1, 3.0) > 0.0);
}

TEST_CASE("monotonicity, contraction and Yosida bound on random pairs") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> tau_d(1e-3, 2.0), s_d(-6.0, 6.0);
  for (const auto& b : all_families()) {
    for (int t = 0; t < 2000; ++t) {
      const double r = sample_in_domain(b, rng), s = sample_in_domain(b, rng);
      CHECK((beta_eval(b, r) - beta_eval(b, s)) * (r - s) >= 0.0);
      const double tau = tau_d(rng);
      const double x = s_d(rng), y = s_d(rng);
      CHECK((yosida(b, tau, x) - yosida(b, tau, y)) * (x - y) >= -1e-14);
      CHECK(std::abs(resolvent(b, tau, x) - resolvent(b, tau, y)) <=
            std::abs(x - y) * (1 + 1e-14) + 1e-15);
      CHECK(std::abs(yosida(b, tau, r)) <= std::abs(beta_eval(b, r)) * (1 + 1e-12) + 1e-14);
    }
  }
}

TEST_CASE("resolvent by Newton and by bisection agree") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> tau_d(1e-3, 5.0), s_d(-10.0, 10.0);
  for (const auto& b : all_families()) {
    for (int t = 0; t < 1000; ++t) {
      const double tau = tau_d(rng), s = s_d(rng);
      const double a = resolvent(b, tau, s, ResolventMethod::newton);
      const double c = resolvent(b, tau, s, ResolventMethod::bisection);
      CHECK(std::abs(a - c) <= 1e-12 * std::max(1.0, std::abs(a)));
      // the residual is only resolvable to one ulp of r times the slope, and
      // not at all when the root lies past the last representable interior point
      const double edge = std::nextafter(1.0, 0.0);
      if (b.bounded_domain() && std::abs(a) == edge) continue;
      const double slope = 1.0 + tau * beta_derivative(b, a);
      const double ulp = std::nextafter(std::abs(a), 2.0) - std::abs(a);
      CHECK(std::abs(a + tau * beta_eval(b, a) - s) <=
            1e-13 * std::max(1.0, std::abs(s)) + 2.0 * slope * ulp);
    }
  }
}

TEST_CASE("logit cubic lower bound holds on [0, 1) and fails for r < 0") {
  // both sides are odd in r, so the bound can only hold for r >= 0; the
  // symmetric form |beta(r)| >= (8/3)|r|^3 holds on the whole domain
  for (int k = 0; k < 10000; ++k) {
    const double r = -0.999 + 1.998 * k / 9999.0;
    const double gap = beta_eval(logit_beta(), r) - 8.0 / 3.0 * r * r * r;
    if (r >= 0.0) CHECK(gap >= 0.0);
    else CHECK(gap < 0.0);
    CHECK(std::abs(beta_eval(logit_beta(), r)) >= 8.0 / 3.0 * std::abs(r * r * r));
  }
}

TEST_CASE("pi families") {
  const PiSpec t{PiFamily::tanh_decay, 1.0};
  CHECK(pi_eval(t, 0.1, 0.0) == 0.0);
  CHECK(pi_derivative(t, 0.1, 0.0) == doctest::Approx(-0.05));
  CHECK(std::abs(pi_eval(t, 0.1, 0.0)) + std::abs(pi_derivative(t, 0.1, 0.0)) <= 0.1);
  CHECK(pi_eval(PiSpec{}, 0.3, 4.0) == 0.0);
  CHECK(pi_eval(t, 0.1, 1.0) < pi_eval(t, 0.1, -1.0));
}

TEST_CASE("validate_assumptions") {
  const Grid g(1, 32);
  const Field u0(g, 0.2);
  const Field g0 = sample(g, [](double x, double) { return std::cos(3.14159265358979 * x); });
  const PiSpec pi{PiFamily::tanh_decay, 1.0};

  auto rep = validate_assumptions(power_beta(3), pi, u0, {g0});
  CHECK(rep.all_passed());
  CHECK(rep.find("A2").passed);

  rep = validate_assumptions(logit_beta(0.25, 1.0), pi, u0, {g0});
  CHECK(rep.find("A2").passed);
  CHECK(rep.find("A1").passed);
  CHECK(validate_assumptions(abs_logit_beta(), pi, u0, {g0}).all_passed());

  rep = validate_assumptions(logit_beta(), pi, Field(g, 1.5), {g0});
  CHECK_FALSE(rep.find("A5").passed);
  CHECK(rep.find("A5").witness == doctest::Approx(1.5));

  // nonzero-mean source violates A3; failures are entries, not exceptions
  rep = validate_assumptions(power_beta(3), pi, u0, {Field(g, 1.0)});
  CHECK_FALSE(rep.find("A3").passed);

  // growth constants that are too large violate A2
  BetaSpec bad = power_beta(3);
  bad.c1 = 1.0;
  CHECK_FALSE(validate_assumptions(bad, pi, u0, {g0}).find("A2").passed);

  // pi budget too small for its c3
  PiSpec over{PiFamily::tanh_decay, 0.0};
  CHECK_FALSE(validate_assumptions(power_beta(3), over, u0, {g0}).find("A4").passed);
}
