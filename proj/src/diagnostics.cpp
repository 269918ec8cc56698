#include "chemo/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <random>

namespace chemo {

bool DiagnosticsLedger::valid() const {
  return std::all_of(q.begin(), q.end(),
                     [](double x) { return std::isfinite(x) && x >= 0.0; });
}

DiagnosticsLedger build_ledger(const Trajectory& traj, const SolverOptions& opts) {
  const Grid& g = traj.grid();
  const SimParams& p = traj.params;
  const double h = p.h();
  DiagnosticsLedger L;
  auto& q = L.q;
  for (int n = 0; n < p.N; ++n) {
    const StepState& a = traj.states[n];
    const StepState& b = traj.states[n + 1];
    Field du = b.u - a.u;
    du *= 1.0 / h;
    const Field dmu = b.mu - a.mu;

    Field total = du + dmu;  // u_hat_t + h mu_hat_t
    total = subtract_mean(std::move(total));
    const double v0 = v0star_norm(g, total, opts);
    q[0] += h * v0 * v0;
    q[1] += h * p.lambda * inner_h(du, du);
    const double dv = norm_v(du);
    q[3] += p.eps * h * h * dv * dv;
    q[6] += h * inner_h(dmu, dmu);  // h^2 |dmu/h|^2 h
    q[7] += h * gradient_inner(b.mu, b.mu);
    const double vs = vstar_norm(g, du, opts);
    q[8] += h * vs * vs;
    const Field lap = laplacian_apply(g, b.u);
    const double uv = norm_v(b.u);
    q[9] += h * p.eps * p.eps * (inner_h(lap, lap) + uv * uv);
    const Field bu = apply_beta(traj.beta, b.u);
    q[10] += h * inner_h(bu, bu);
    const double mv = norm_v(b.mu);
    q[11] += h * mv * mv;

    q[2] = std::max(q[2], p.eps * uv * uv);
    q[4] = std::max(q[4], std::pow(norm_l4(b.u), 4));
    q[5] = std::max(q[5], h * inner_h(b.mu, b.mu));
  }
  return L;
}

void write_ledger_header(std::ostream& os) {
  os << "eps,lambda,h,beta,eta";
  for (int k = 1; k <= 12; ++k) os << ",q" << k;
  os << '\n';
}

void write_ledger_row(std::ostream& os, const Trajectory& traj,
                      const DiagnosticsLedger& ledger) {
  os << std::setprecision(17) << traj.params.eps << ',' << traj.params.lambda
     << ',' << traj.params.h() << ',' << to_string(traj.beta.family) << ','
     << traj.params.eta;
  for (double x : ledger.q) os << ',' << x;
  os << '\n';
}

double IdentityGap::relative() const {
  const double gap = std::abs(lhs - rhs);
  if (gap == 0.0) return 0.0;
  return scale > 0.0 ? gap / scale : std::numeric_limits<double>::infinity();
}

bool IdentityReport::passes(double tol) const {
  return interpolant_l2 <= tol && interpolant_jump <= tol && energy <= tol &&
         conservation <= tol && subdifferential >= -tol;
}

IdentityGap energy_identity_gap(const Trajectory& traj, int n) {
  const SimParams& p = traj.params;
  const double h = p.h();
  const Field& u0 = traj.states[n].u;
  const Field& u1 = traj.states[n + 1].u;
  const Field& mu1 = traj.states[n + 1].mu;
  const Field diff = u1 - u0;

  const double v1 = norm_v(u1), v0 = norm_v(u0), vd = norm_v(diff);
  const double t1 = p.lambda / h * inner_h(diff, diff);
  const double t2 = 0.5 * p.eps * (v1 * v1 - v0 * v0 + vd * vd);
  const double t3 = inner_h(apply_beta(traj.beta, u1), diff);
  Field rest = apply_pi(traj.pi, p.eps, u1);
  rest -= traj.sources[n];
  rest.axpy(-p.eps, u1);
  const double t4 = inner_h(rest, diff);

  IdentityGap gap;
  gap.lhs = inner_h(diff, mu1);
  gap.rhs = t1 + t2 + t3 + t4;
  gap.scale = std::abs(gap.lhs) + std::abs(t1) + std::abs(t2) + std::abs(t3) +
              std::abs(t4);
  return gap;
}

IdentityGap conservation_gap(const Trajectory& traj, int n) {
  const double h = traj.h();
  Field du = traj.states[n + 1].u - traj.states[n].u;
  du *= 1.0 / h;
  const Field dmu = traj.states[n + 1].mu - traj.states[n].mu;
  IdentityGap gap;
  gap.lhs = mean(du + dmu);
  gap.rhs = 0.0;
  gap.scale = norm_h(du) + norm_h(dmu);
  return gap;
}

IdentityReport check_identities(const Trajectory& traj) {
  IdentityReport R;
  const InterpolantView view(traj);
  const double h = traj.h();
  const int N = traj.params.N;

  {
    IdentityGap g;
    g.lhs = view.u_bar_minus_hat_l2h_sq();
    g.rhs = h * h / 3.0 * view.u_hat_t_l2h_sq();
    g.scale = std::max(std::abs(g.lhs), std::abs(g.rhs));
    R.interpolant_l2 = g.relative();
  }

  const double m0 = mean(traj.states.front().u);
  R.subdifferential = std::numeric_limits<double>::infinity();
  for (int n = 0; n < N; ++n) {
    const double t = traj.time(n) + 0.5 * h;
    Field lhs = view.u_hat_t(t);
    lhs *= h;
    const Field rhs = view.u_bar(t) - view.u_under(t);
    const double scale = std::max(max_abs(rhs), std::numeric_limits<double>::min());
    const double jump = max_abs(lhs - rhs) / scale;
    R.interpolant_jump = std::max(R.interpolant_jump, max_abs(rhs) == 0.0 ? max_abs(lhs) : jump);

    const IdentityGap e = energy_identity_gap(traj, n);
    R.energy_steps.push_back(e);
    R.energy = std::max(R.energy, e.relative());
    R.conservation = std::max(R.conservation, conservation_gap(traj, n).relative());

    const Field& u0 = traj.states[n].u;
    const Field& u1 = traj.states[n + 1].u;
    const double slack = inner_h(apply_beta(traj.beta, u1), u1 - u0) -
                         (integral_beta_hat(traj.beta, u1) -
                          integral_beta_hat(traj.beta, u0));
    R.subdifferential = std::min(R.subdifferential, slack);

    Field total = u1;
    total.axpy(h, traj.states[n + 1].mu);
    R.global_mean = std::max(R.global_mean, std::abs(mean(total) - m0));
  }
  if (N == 0) R.subdifferential = 0.0;
  return R;
}

PtReport check_pt_inequality(const Grid& g, const BetaSpec& b,
                             const std::vector<double>& taus, int trials,
                             std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("need at least one trial");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::uniform_real_distribution<double> amp(0.05, 2.0), shift(-0.5, 0.5);
  PtReport R;
  R.min_pairing = std::numeric_limits<double>::infinity();
  R.min_normalized = std::numeric_limits<double>::infinity();
  for (int t = 0; t < trials; ++t) {
    Field u(g);
    for (double& x : u.values()) x = noise(rng);
    u = shifted_solve(g, u, 1.0, 0.002);
    u *= amp(rng) / std::max(max_abs(u), 1e-300);
    const double offset = shift(rng);
    for (double& x : u.values()) x += offset;
    const Field minus_lap = -laplacian_apply(g, u);
    for (double tau : taus) {
      const Field bt = apply_yosida(b, tau, u);
      const double pairing = inner_h(minus_lap, bt);
      const double scale = norm_h(minus_lap) * norm_h(bt);
      R.min_pairing = std::min(R.min_pairing, pairing);
      R.min_normalized =
          std::min(R.min_normalized, scale > 0.0 ? pairing / scale : 0.0);
    }
    ++R.trials;
  }
  return R;
}

GrowthBound check_growth_bound(const BetaSpec& b, double m0, double tau,
                               int samples) {
  if (!b.in_domain(m0))
    throw DomainError("m0 must be interior to D(beta)", m0);
  if (!(tau > 0.0)) throw std::invalid_argument("tau must be positive");
  const double lo = b.bounded_domain() ? -1.5 : m0 - 10.0;
  const double hi = b.bounded_domain() ? 1.5 : m0 + 10.0;
  std::vector<double> r(samples), bt(samples);
  for (int k = 0; k < samples; ++k) {
    r[k] = lo + (hi - lo) * k / (samples - 1.0);
    bt[k] = yosida(b, tau, r[k]);
  }
  GrowthBound G;
  G.samples = samples;
  G.c1 = 1.0;
  double need = 0.0;
  for (int k = 0; k < samples; ++k)
    need = std::max(need, G.c1 * std::abs(bt[k]) - bt[k] * (r[k] - m0));
  G.c2 = need + 1e-12 * std::max(1.0, need);
  G.worst_margin = std::numeric_limits<double>::infinity();
  for (int k = 0; k < samples; ++k)
    G.worst_margin = std::min(
        G.worst_margin, bt[k] * (r[k] - m0) - G.c1 * std::abs(bt[k]) + G.c2);
  G.certified = G.worst_margin >= 0.0 && G.c2 > 0.0;
  return G;
}

double InitialDataBounds::ceiling() const {
  return std::max({l4_pow4, beta_hat_integral, eps_gradient});
}

InitialDataBounds initial_data_bounds(const BetaSpec& b, const Field& u0,
                                      const std::vector<double>& eps_values,
                                      const SolverOptions& opts) {
  InitialDataBounds B;
  const double m0 = mean(u0);
  for (double eps : eps_values) {
    const Field s = smooth_initial(u0.grid(), u0, eps, opts);
    B.l4_pow4 = std::max(B.l4_pow4, std::pow(norm_l4(s), 4));
    B.beta_hat_integral = std::max(B.beta_hat_integral, integral_beta_hat(b, s));
    B.eps_gradient = std::max(B.eps_gradient, eps * gradient_inner(s, s));
    B.max_mean_drift = std::max(B.max_mean_drift, std::abs(mean(s) - m0));
  }
  return B;
}

}  // namespace chemo
