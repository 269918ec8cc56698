#include "chemo/scheme.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace chemo {

TimeSource TimeSource::zero(const Grid& g) { return constant(Field(g)); }

TimeSource TimeSource::constant(Field f) {
  return piecewise_constant({0.0}, {std::move(f)});
}

TimeSource TimeSource::analytic(std::function<Field(double)> fn) {
  TimeSource s;
  s.fn_ = std::move(fn);
  return s;
}

TimeSource TimeSource::piecewise_constant(std::vector<double> starts,
                                          std::vector<Field> values) {
  if (starts.empty() || starts.size() != values.size())
    throw std::invalid_argument("piecewise source needs one start per value");
  if (starts.front() != 0.0)
    throw std::invalid_argument("piecewise source must start at t = 0");
  for (std::size_t k = 1; k < starts.size(); ++k) {
    if (!(starts[k] > starts[k - 1]))
      throw std::invalid_argument("piecewise source starts must increase");
    require_same_grid(values[k], values[0]);
  }
  TimeSource s;
  s.starts_ = std::move(starts);
  s.values_ = std::move(values);
  return s;
}

Field TimeSource::at(double t) const {
  if (fn_) return fn_(t);
  const auto it = std::upper_bound(starts_.begin(), starts_.end(), t);
  const std::size_t k = it == starts_.begin() ? 0 : (it - starts_.begin()) - 1;
  return values_[k];
}

Field TimeSource::exact_average(double a, double b) const {
  if (fn_) throw std::logic_error("exact average needs a piecewise source");
  Field acc(values_.front().grid());
  for (std::size_t k = 0; k < starts_.size(); ++k) {
    const double lo = std::max(a, starts_[k]);
    const double hi = std::min(
        b, k + 1 < starts_.size() ? starts_[k + 1]
                                  : std::numeric_limits<double>::infinity());
    if (hi > lo) acc.axpy((hi - lo) / (b - a), values_[k]);
  }
  return acc;
}

std::vector<Field> average_sources(const TimeSource& f, const SimParams& params) {
  if (params.N < 1 || !(params.T > 0.0))
    throw std::invalid_argument("invalid params: need N >= 1 and T > 0");
  const double h = params.h();
  std::vector<Field> out;
  out.reserve(params.N);
  for (int k = 1; k <= params.N; ++k) {
    if (f.is_piecewise_constant())
      out.push_back(f.exact_average((k - 1) * h, k * h));
    else
      out.push_back(f.at((k - 0.5) * h));
  }
  return out;
}

StepState step(const StepState& prev, const Field& f_next,
               const SimParams& params, const BetaSpec& b, const PiSpec& p,
               const SolverOptions& opts, double* residual_out) {
  const Grid& g = prev.u.grid();
  const double h = params.h();
  Field adv = advective_divergence(g, prev.u, prev.v);
  adv *= params.eta;

  // h f + lambda u_n + K (u_n + h mu_n - h adv)
  Field inner = prev.u;
  inner.axpy(h, prev.mu);
  inner.axpy(-h, adv);
  Field rhs = helmholtz_solve(g, inner, opts);
  rhs.axpy(h, f_next);
  rhs.axpy(params.lambda, prev.u);

  StepSolution sol = step_solve_detailed(g, params, b, p, rhs, prev.u, opts);
  if (residual_out) *residual_out = sol.residual;

  StepState next;
  next.n = prev.n + 1;
  Field mu_rhs = prev.mu;
  mu_rhs.axpy(-1.0 / h, sol.u);
  mu_rhs.axpy(1.0 / h, prev.u);
  mu_rhs -= adv;
  next.mu = helmholtz_solve(g, mu_rhs, opts);
  next.v = helmholtz_solve(g, sol.u, opts);
  next.u = std::move(sol.u);
  return next;
}

Field initial_datum(const Scenario& s, const SolverOptions& opts) {
  if (!s.smooth_initial) return s.u0;
  return smooth_initial(s.u0.grid(), s.u0, s.params.eps, opts);
}

Trajectory run(const Scenario& scenario, const SolverOptions& opts) {
  scenario.params.validate();
  opts.validate();
  const Grid& g = scenario.u0.grid();

  Trajectory traj;
  traj.params = scenario.params;
  traj.beta = scenario.beta;
  traj.pi = scenario.pi;
  const TimeSource source =
      scenario.source ? *scenario.source : TimeSource::zero(g);
  traj.sources = average_sources(source, scenario.params);

  StepState s0;
  s0.u = initial_datum(scenario, opts);
  s0.mu = Field(g);
  s0.v = helmholtz_solve(g, s0.u, opts);
  traj.states.reserve(scenario.params.N + 1);
  traj.states.push_back(std::move(s0));

  for (int n = 0; n < scenario.params.N; ++n) {
    try {
      double residual = 0.0;
      StepState next = step(traj.states.back(), traj.sources[n], traj.params,
                            traj.beta, traj.pi, opts, &residual);
      if (!next.u.all_finite() || !next.mu.all_finite())
        throw StepFailure("non-finite state", {residual});
      traj.step_residuals.push_back(residual);
      traj.states.push_back(std::move(next));
    } catch (const std::exception& e) {
      std::ostringstream os;
      os << "step " << n + 1 << " failed: " << e.what();
      throw RunFailure(os.str(), n + 1, std::move(traj));
    }
  }
  return traj;
}

InterpolantView::InterpolantView(const Trajectory& traj) : traj_(&traj) {
  if (traj.states.size() != static_cast<std::size_t>(traj.params.N) + 1)
    throw std::invalid_argument("interpolants need a complete trajectory");
}

void InterpolantView::require_time(double t) const {
  if (!(t >= 0.0 && t <= T())) {
    std::ostringstream os;
    os << "time " << t << " outside [0, " << T() << "]";
    throw std::out_of_range(os.str());
  }
}

int InterpolantView::interval(double t) const {
  require_time(t);
  const int n = static_cast<int>(std::floor(t / traj_->h()));
  return std::clamp(n, 0, steps() - 1);
}

namespace {

Field lerp(const Field& a, const Field& b, double s) {
  Field out = a;
  out *= 1.0 - s;
  out.axpy(s, b);
  return out;
}

Field diff_quotient(const Field& a, const Field& b, double h) {
  Field out = b;
  out -= a;
  out *= 1.0 / h;
  return out;
}

}  // namespace

Field InterpolantView::u_hat(double t) const {
  const int n = interval(t);
  const double s = (t - traj_->time(n)) / traj_->h();
  return lerp(traj_->states[n].u, traj_->states[n + 1].u, s);
}

Field InterpolantView::u_bar(double t) const {
  return traj_->states[interval(t) + 1].u;
}

Field InterpolantView::u_under(double t) const {
  return traj_->states[interval(t)].u;
}

Field InterpolantView::u_hat_t(double t) const {
  const int n = interval(t);
  return diff_quotient(traj_->states[n].u, traj_->states[n + 1].u, traj_->h());
}

Field InterpolantView::mu_hat(double t) const {
  const int n = interval(t);
  const double s = (t - traj_->time(n)) / traj_->h();
  return lerp(traj_->states[n].mu, traj_->states[n + 1].mu, s);
}

Field InterpolantView::mu_bar(double t) const {
  return traj_->states[interval(t) + 1].mu;
}

Field InterpolantView::mu_hat_t(double t) const {
  const int n = interval(t);
  return diff_quotient(traj_->states[n].mu, traj_->states[n + 1].mu,
                       traj_->h());
}

Field InterpolantView::f_bar(double t) const {
  return traj_->sources[interval(t)];
}

double InterpolantView::u_hat_t_l2h_sq() const {
  double sum = 0.0;
  for (int n = 0; n < steps(); ++n) {
    const Field d = u_hat_t(traj_->time(n) + 0.5 * traj_->h());
    sum += traj_->h() * inner_h(d, d);
  }
  return sum;
}

double InterpolantView::u_bar_minus_hat_l2h_sq() const {
  const double h = traj_->h();
  const double gauss = 0.5 / std::sqrt(3.0);
  double sum = 0.0;
  for (int n = 0; n < steps(); ++n) {
    const double mid = traj_->time(n) + 0.5 * h;
    for (double off : {-gauss, gauss}) {
      const double t = mid + off * h;
      const Field e = u_bar(t) - u_hat(t);
      sum += 0.5 * h * inner_h(e, e);
    }
  }
  return sum;
}

namespace {

template <class Norm>
double sup_over(const std::vector<StepState>& states, std::size_t first,
                Norm norm) {
  double m = 0.0;
  for (std::size_t k = first; k < states.size(); ++k)
    m = std::max(m, norm(states[k]));
  return m;
}

}  // namespace

double InterpolantView::u_hat_linf_v() const {
  return sup_over(traj_->states, 0, [](const StepState& s) { return norm_v(s.u); });
}

double InterpolantView::u_bar_linf_v() const {
  return sup_over(traj_->states, 1, [](const StepState& s) { return norm_v(s.u); });
}

double InterpolantView::u_hat_linf_l4() const {
  return sup_over(traj_->states, 0, [](const StepState& s) { return norm_l4(s.u); });
}

double InterpolantView::u_bar_linf_l4() const {
  return sup_over(traj_->states, 1, [](const StepState& s) { return norm_l4(s.u); });
}

double InterpolantView::mu_hat_linf_h() const {
  return sup_over(traj_->states, 0, [](const StepState& s) { return norm_h(s.mu); });
}

double InterpolantView::mu_bar_linf_h() const {
  return sup_over(traj_->states, 1, [](const StepState& s) { return norm_h(s.mu); });
}

}  // namespace chemo
