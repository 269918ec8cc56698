#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "chemo/diagnostics.hpp"
#include "oracles.hpp"

using namespace chemo;
using std::numbers::pi;

namespace {

Trajectory constant_trajectory(const Grid& g, double m0, double mu, int N) {
  Trajectory tr;
  tr.params.N = N;
  tr.params.T = 0.1;
  tr.beta = power_beta(3);
  for (int n = 0; n <= N; ++n)
    tr.states.push_back({n, Field(g, m0), Field(g, mu), Field(g, m0)});
  for (int n = 0; n < N; ++n) tr.sources.emplace_back(g);
  return tr;
}

Scenario cosine_scenario(const Grid& g, const BetaSpec& b, int N, double eta) {
  Scenario s;
  s.params.eps = 0.1;
  s.params.lambda = 0.01;
  s.params.N = N;
  s.params.T = 0.05;
  s.params.eta = eta;
  s.params.c3 = 1.0;
  s.beta = b;
  s.pi = PiSpec{PiFamily::tanh_decay, 1.0};
  s.u0 = sample(g, [](double x, double) { return 0.1 + 0.4 * std::cos(pi * x); });
  return s;
}

}  // namespace

TEST_CASE("ledger of the zero trajectory vanishes") {
  const Grid g(1, 16);
  const Trajectory tr = constant_trajectory(g, 0.0, 0.0, 4);
  const auto L = build_ledger(tr);
  CHECK(L.valid());
  for (int k = 1; k <= 12; ++k) CHECK(L[k] == 0.0);
}

TEST_CASE("ledger of a constant trajectory") {
  const Grid g(2, 8);
  const double m0 = 0.4;
  const Trajectory tr = constant_trajectory(g, m0, 0.3, 5);
  const auto L = build_ledger(tr);
  for (int k : {2, 4, 7, 8, 9}) CHECK(L[k] == doctest::Approx(0.0));
  CHECK(L[5] == doctest::Approx(std::pow(m0, 4)));
  CHECK(L[3] == doctest::Approx(tr.params.eps * m0 * m0));
  CHECK(L[11] == doctest::Approx(0.1 * std::pow(m0, 6)));
}

TEST_CASE("ledger is reproducible and serializes") {
  const Grid g(1, 32);
  const Trajectory tr = run(cosine_scenario(g, power_beta(3), 16, 0.5));
  const auto a = build_ledger(tr), b = build_ledger(tr);
  CHECK(a.q == b.q);
  std::ostringstream os;
  write_ledger_header(os);
  write_ledger_row(os, tr, a);
  const std::string s = os.str();
  CHECK(s.rfind("eps,lambda,h,beta,eta,q1", 0) == 0);
  CHECK(s.find("power") != std::string::npos);
}

TEST_CASE("discrete identities hold along a run") {
  for (int d : {1, 2}) {
    const Grid g(d, d == 1 ? 32 : 12);
    for (const auto& b : {power_beta(3), logit_beta()}) {
      const Trajectory tr = run(cosine_scenario(g, b, 10, 0.5));
      const auto rep = check_identities(tr);
      CHECK(rep.passes(1e-10));
      CHECK(rep.global_mean < 1e-12);
      CHECK(rep.energy_steps.size() == 10);
    }
  }
}

TEST_CASE("PT inequality on random smooth fields") {
  const Grid g(1, 64);
  for (const auto& b : {power_beta(3), logit_beta(), abs_logit_beta()}) {
    const auto r = check_pt_inequality(g, b, {1e-1, 1e-3}, 100, 3);
    CHECK(r.trials == 100);
    CHECK(r.min_pairing >= -1e-12);
  }
  const Grid g2(2, 16);
  CHECK(check_pt_inequality(g2, power_beta(3), {1e-2}, 20, 5).min_pairing >= -1e-12);
}

TEST_CASE("growth bound constants") {
  // linear beta_tau(r) = a r with a = 1/(1+tau):
  // min of a r (r - m0) - a |r| is -a (1 + |m0|)^2 / 4
  for (double m0 : {0.0, 0.3}) {
    const double tau = 0.01;
    const auto G = check_growth_bound(linear_beta(), m0, tau, 200001);
    const double a = 1.0 / (1.0 + tau);
    CHECK(G.certified);
    CHECK(G.c1 == 1.0);
    CHECK(G.c2 == doctest::Approx(a * (1 + m0) * (1 + m0) / 4).epsilon(1e-3));
  }
  CHECK(check_growth_bound(power_beta(3), 0.2, 1e-3).certified);
  CHECK(check_growth_bound(logit_beta(), -0.5, 1e-3).certified);
  CHECK_THROWS_AS(check_growth_bound(logit_beta(), 1.5, 1e-3), DomainError);
}

TEST_CASE("initial data bounds") {
  const Grid g(1, 64);
  const Field u0 = sample(g, [](double x, double) { return x < 0.5 ? 0.6 : -0.4; });
  const auto B = initial_data_bounds(logit_beta(), u0, {1.0, 0.1, 0.01});
  CHECK(std::isfinite(B.ceiling()));
  CHECK(B.max_mean_drift < 1e-12);
  CHECK(B.l4_pow4 <= std::pow(0.6, 4) + 1e-12);
}
