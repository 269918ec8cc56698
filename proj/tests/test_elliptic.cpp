#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "chemo/elliptic.hpp"
#include "oracles.hpp"

using namespace chemo;
using std::numbers::pi;

namespace {

Field apply_dense(const oracle::Matrix& m, const Field& x) {
  Field out(x.grid());
  for (std::size_t i = 0; i < x.size(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) s += m[i][j] * x[j];
    out[i] = s;
  }
  return out;
}

}  // namespace

TEST_CASE("helmholtz_solve keeps constants") {
  for (int d : {1, 2}) {
    const Grid g(d, 16);
    CHECK(max_abs(helmholtz_solve(g, Field(g, 3.0)) - Field(g, 3.0)) < 1e-12);
  }
}

TEST_CASE("helmholtz_solve matches the dense inverse") {
  std::mt19937_64 rng(1);
  for (int d : {1, 2}) {
    const Grid g(d, d == 1 ? 20 : 6);
    const auto K = oracle::dense_helmholtz_inverse(g);
    for (int t = 0; t < 5; ++t) {
      const Field r = oracle::random_field(g, rng);
      CHECK(max_abs(helmholtz_solve(g, r) - apply_dense(K, r)) < 1e-10 * max_abs(r));
    }
  }
}

TEST_CASE("helmholtz_solve on cos(2 pi x) is second order") {
  double err[2];
  int idx = 0;
  for (int n : {64, 128}) {
    const Grid g(1, n);
    const Field rhs = sample(g, [](double x, double) { return std::cos(2 * pi * x); });
    const Field exact = sample(g, [](double x, double) {
      return std::cos(2 * pi * x) / (1 + 4 * pi * pi);
    });
    err[idx++] = max_abs(helmholtz_solve(g, rhs) - exact);
  }
  CHECK(err[1] < 1e-4);
  CHECK(err[0] / err[1] == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("helmholtz_solve is self-adjoint and contractive") {
  std::mt19937_64 rng(2);
  for (int d : {1, 2}) {
    const Grid g(d, d == 1 ? 64 : 16);
    for (int t = 0; t < 20; ++t) {
      const Field a = oracle::random_field(g, rng), b = oracle::random_field(g, rng);
      const double x = inner_h(helmholtz_solve(g, a), b);
      const double y = inner_h(a, helmholtz_solve(g, b));
      CHECK(std::abs(x - y) <= 1e-11 * norm_h(a) * norm_h(b));
      CHECK(norm_h(helmholtz_solve(g, a)) <= norm_h(a));
    }
  }
}

TEST_CASE("neumann_poisson_solve") {
  const Grid g(1, 128);
  const Field c = sample(g, [](double x, double) { return std::cos(pi * x); });
  const Field w = neumann_poisson_solve(g, c);
  CHECK(std::abs(mean(w)) < 1e-14);
  CHECK(max_abs(w - (1.0 / (pi * pi)) * c) < 1e-5);
  CHECK(max_abs(neumann_poisson_solve(g, Field(g))) == 0.0);
  CHECK_THROWS_AS(neumann_poisson_solve(g, Field(g, 1.0)), CompatibilityError);

  // residual check in 1D and 2D
  std::mt19937_64 rng(4);
  for (int d : {1, 2}) {
    const Grid gd(d, d == 1 ? 50 : 12);
    const Field r = subtract_mean(oracle::random_field(gd, rng));
    const Field s = neumann_poisson_solve(gd, r);
    CHECK(std::abs(mean(s)) < 1e-12);
    CHECK(max_abs(-laplacian_apply(gd, s) - r) < 1e-8 * max_abs(r));
  }
}

TEST_CASE("source_potential") {
  const Grid g(1, 128);
  CHECK(max_abs(source_potential(g, Field(g))) == 0.0);
  const Field gf = sample(g, [](double x, double) { return pi * pi * std::cos(pi * x); });
  const Field c = sample(g, [](double x, double) { return std::cos(pi * x); });
  const Field f = source_potential(g, gf);
  CHECK(max_abs(f - c) < 1e-3);

  // weak form: (grad f, grad z) = (g, z)
  std::mt19937_64 rng(9);
  for (int d : {1, 2}) {
    const Grid gd(d, d == 1 ? 64 : 16);
    const Field gg = subtract_mean(oracle::random_field(gd, rng));
    const Field ff = source_potential(gd, gg);
    for (int t = 0; t < 10; ++t) {
      const Field z = oracle::random_field(gd, rng);
      CHECK(std::abs(gradient_inner(ff, z) - inner_h(gg, z)) < 1e-9 * norm_h(gg) * norm_h(z));
    }
  }
}

TEST_CASE("dual norms") {
  const Grid g(1, 256);
  CHECK(vstar_norm(g, Field(g, 1.0)) == doctest::Approx(1.0));
  CHECK(vstar_norm(g, Field(g)) == 0.0);
  const Field c = sample(g, [](double x, double) { return std::cos(pi * x); });
  CHECK(vstar_norm(g, c) * vstar_norm(g, c) ==
        doctest::Approx(0.5 / (1 + pi * pi)).epsilon(1e-4));
  CHECK(v0star_norm(g, c) * v0star_norm(g, c) ==
        doctest::Approx(0.5 / (pi * pi)).epsilon(1e-4));
}

TEST_CASE("smooth_initial preserves the mean") {
  const Grid g(2, 16);
  std::mt19937_64 rng(12);
  const Field u = oracle::random_field(g, rng);
  const Field s = smooth_initial(g, u, 0.1);
  CHECK(mean(s) == doctest::Approx(mean(u)).epsilon(1e-12));
  CHECK(norm_h(s) <= norm_h(u));
}

namespace {

SimParams params_for(double eps, double lambda, int N, double T) {
  SimParams p;
  p.eps = eps;
  p.lambda = lambda;
  p.N = N;
  p.T = T;
  return p;
}

}  // namespace

TEST_CASE("step_solve: zero data gives zero") {
  const Grid g(1, 32);
  const SimParams p = params_for(0.1, 0.01, 32, 0.1);
  for (const auto& b : {linear_beta(), power_beta(3), logit_beta(), abs_logit_beta()}) {
    const Field u = step_solve(g, p, b, PiSpec{}, Field(g), Field(g));
    CHECK(max_abs(u) == 0.0);
  }
}

TEST_CASE("step_solve: linear beta matches a dense linear solve") {
  std::mt19937_64 rng(31);
  for (int d : {1, 2}) {
    const Grid g(d, d == 1 ? 24 : 6);
    const SimParams p = params_for(0.1, 0.01, 40, 0.1);
    const double h = p.h();
    const auto K = oracle::dense_helmholtz_inverse(g);
    const auto L = oracle::dense_laplacian(g);
    oracle::Matrix A = K;
    for (std::size_t i = 0; i < A.size(); ++i)
      for (std::size_t j = 0; j < A.size(); ++j)
        A[i][j] += -p.eps * h * L[i][j] + (i == j ? p.lambda + h : 0.0);
    const Field rhs = oracle::random_field(g, rng);
    const Field expect(g, oracle::dense_solve(A, rhs.data()));
    const Field u = step_solve(g, p, linear_beta(), PiSpec{}, rhs, Field(g));
    CHECK(max_abs(u - expect) < 1e-9);
  }
}

TEST_CASE("step_solve: residual, warm-start independence and domain safety") {
  const Grid g(1, 48);
  SimParams p = params_for(0.1, 0.01, 64, 0.1);
  p.c3 = 1.0;
  const PiSpec pi_spec{PiFamily::tanh_decay, 1.0};
  std::mt19937_64 rng(8);
  SolverOptions opts;
  for (const auto& b : {power_beta(3), logit_beta(), abs_logit_beta()}) {
    const Field target = sample(g, [](double x, double) { return 0.6 * std::cos(3 * x) + 0.1; });
    // rhs produced by a known state keeps the solution inside the domain
    const Field rhs = step_operator(g, p, b, pi_spec, 0.0, target);
    const auto sol = step_solve_detailed(g, p, b, pi_spec, rhs, Field(g), opts);
    CHECK(max_abs(sol.u - target) < 1e-9);
    CHECK(sol.residual <= opts.newton_tol * std::max(1.0, norm_h(rhs)));
    const Field other = step_solve(g, p, b, pi_spec, rhs, oracle::random_field(g, rng, 0.3), opts);
    CHECK(max_abs(other - sol.u) < 1e-9);
  }
  // a solution pressed against the walls of D(beta)
  const Field wall = sample(g, [](double x, double) { return 0.999 * std::tanh(20 * (0.5 - x)); });
  const Field rhs = step_operator(g, p, logit_beta(), pi_spec, 0.0, wall);
  const Field u = step_solve(g, p, logit_beta(), pi_spec, rhs, Field(g));
  for (double x : u.values()) CHECK(std::abs(x) < 1.0);
  CHECK(max_abs(u - wall) < 1e-9);
}

TEST_CASE("step_solve rejects the stepsize violation") {
  const Grid g(1, 16);
  SimParams p = params_for(0.1, 0.01, 4, 0.1);  // h = 0.025 >= lambda/(2 c3 eps)
  p.c3 = 2.0;
  CHECK_THROWS_AS(step_solve(g, p, power_beta(3), PiSpec{}, Field(g), Field(g)),
                  std::invalid_argument);
}

TEST_CASE("coercivity of the per-step operator") {
  const Grid g(1, 32);
  SimParams p = params_for(0.1, 0.01, 40, 0.1);
  p.c3 = 1.0;
  const PiSpec pi_spec{PiFamily::tanh_decay, 1.0};
  const double h = p.h();
  const double c = std::min(p.lambda - p.c3 * p.eps * h, p.eps * h);
  std::mt19937_64 rng(77);
  for (int t = 0; t < 200; ++t) {
    const Field u = oracle::random_field(g, rng), w = oracle::random_field(g, rng);
    const Field d = u - w;
    const double pairing = inner_h(step_operator(g, p, power_beta(3), pi_spec, 1e-3, u) -
                                       step_operator(g, p, power_beta(3), pi_spec, 1e-3, w),
                                   d);
    CHECK(pairing >= c * norm_v(d) * norm_v(d));
  }
}
