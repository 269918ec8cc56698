#include "chemo/limits.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iomanip>
#include <thread>

namespace chemo {

std::string to_string(StudyAxis a) {
  switch (a) {
    case StudyAxis::h: return "h";
    case StudyAxis::lambda: return "lambda";
    case StudyAxis::epsilon: return "epsilon";
  }
  return "?";
}

StudyAxis study_axis_from_string(const std::string& name) {
  if (name == "h") return StudyAxis::h;
  if (name == "lambda") return StudyAxis::lambda;
  if (name == "epsilon" || name == "eps") return StudyAxis::epsilon;
  throw std::invalid_argument("unknown study axis '" + name + "'");
}

namespace {

// u_hat of a trajectory at arbitrary t in [0, T].
Field hat_at(const Trajectory& traj, double t) {
  const int N = traj.params.N;
  const double h = traj.h();
  const double pos = t / h;
  int n = std::clamp(static_cast<int>(std::floor(pos)), 0, N - 1);
  double s = pos - n;
  // snap to nodes to avoid roundoff at shared breakpoints
  if (std::abs(s) < 1e-12) s = 0.0;
  if (std::abs(s - 1.0) < 1e-12) s = 1.0;
  Field out = traj.states[n].u;
  out *= 1.0 - s;
  out.axpy(s, traj.states[n + 1].u);
  return out;
}

}  // namespace

HatDifference hat_difference(const Trajectory& a, const Trajectory& b,
                             const SolverOptions& opts) {
  if (std::abs(a.params.T - b.params.T) > 1e-14 * a.params.T)
    throw std::invalid_argument("trajectories cover different time intervals");
  require_same_grid(a.states.front().u, b.states.front().u);
  const Grid& g = a.grid();
  const double T = a.params.T;

  std::vector<double> times;
  for (int n = 0; n <= a.params.N; ++n) times.push_back(a.time(n));
  for (int n = 0; n <= b.params.N; ++n) times.push_back(b.time(n));
  std::sort(times.begin(), times.end());
  std::vector<double> merged;
  for (double t : times) {
    t = std::min(t, T);
    if (merged.empty() || t - merged.back() > 1e-12 * T) merged.push_back(t);
  }

  HatDifference d;
  std::vector<Field> e, ke;
  for (double t : merged) {
    e.push_back(hat_at(a, t) - hat_at(b, t));
    ke.push_back(helmholtz_solve(g, e.back(), opts));
    d.linf_h = std::max(d.linf_h, norm_h(e.back()));
  }
  double sq = 0.0;
  for (std::size_t k = 0; k + 1 < merged.size(); ++k) {
    const double dt = merged[k + 1] - merged[k];
    const double aa = inner_h(e[k], ke[k]);
    const double ab = inner_h(e[k], ke[k + 1]);
    const double bb = inner_h(e[k + 1], ke[k + 1]);
    sq += dt / 3.0 * (aa + ab + bb);
  }
  d.l2_vstar = std::sqrt(std::max(0.0, sq));
  return d;
}

std::vector<std::optional<double>> estimate_order(const std::vector<double>& diffs,
                                                  double noise_floor,
                                                  double ratio) {
  std::vector<double> levels(diffs.size());
  for (std::size_t k = 0; k < diffs.size(); ++k) levels[k] = std::pow(ratio, -double(k));
  return estimate_order(diffs, levels, noise_floor);
}

std::vector<std::optional<double>> estimate_order(const std::vector<double>& diffs,
                                                  const std::vector<double>& levels,
                                                  double noise_floor) {
  if (levels.size() < diffs.size())
    throw std::invalid_argument("need one level per difference");
  std::vector<std::optional<double>> out;
  for (std::size_t k = 0; k + 1 < diffs.size(); ++k) {
    if (!(diffs[k] > noise_floor && diffs[k + 1] > noise_floor)) {
      out.push_back(std::nullopt);
      continue;
    }
    out.push_back(std::log(diffs[k] / diffs[k + 1]) /
                  std::log(levels[k] / levels[k + 1]));
  }
  return out;
}

std::vector<double> StudyReport::diffs_linf() const {
  std::vector<double> out;
  for (const auto& d : diffs) out.push_back(d.linf_h);
  return out;
}

std::vector<double> StudyReport::diffs_l2() const {
  std::vector<double> out;
  for (const auto& d : diffs) out.push_back(d.l2_vstar);
  return out;
}

SimParams level_params(StudyAxis axis, const SimParams& base, double level) {
  SimParams p = base;
  switch (axis) {
    case StudyAxis::h:
      p.N = static_cast<int>(std::lround(base.T / level));
      break;
    case StudyAxis::lambda:
      p.lambda = level;
      break;
    case StudyAxis::epsilon:
      p.eps = level;
      p.lambda = level / 10.0;
      break;
  }
  return p;
}

StudyReport study(StudyAxis axis, const Scenario& base,
                  const std::vector<double>& levels, const SolverOptions& opts,
                  int jobs) {
  if (levels.size() < 2) throw std::invalid_argument("a study needs at least two levels");
  for (std::size_t k = 1; k < levels.size(); ++k)
    if (!(levels[k] < levels[k - 1]))
      throw std::invalid_argument("study levels must be strictly decreasing");

  StudyReport R;
  R.axis = axis;
  R.noise_floor = 10.0 * opts.newton_tol;
  const std::size_t count = levels.size();
  R.levels.resize(count);
  std::vector<std::optional<Trajectory>> trajs(count);

  for (std::size_t k = 0; k < count; ++k) {
    R.levels[k].value = levels[k];
    R.levels[k].params = level_params(axis, base.params, levels[k]);
  }

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < count; k = next++) {
      StudyLevel& L = R.levels[k];
      try {
        Scenario s = base;
        s.params = L.params;
        trajs[k] = run(s, opts);
        L.ledger = build_ledger(*trajs[k], opts);
        L.ok = true;
      } catch (const std::exception& e) {
        L.error = e.what();
      }
    }
  };
  const int workers = std::max(1, std::min<int>(jobs, static_cast<int>(count)));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  // truncate at the first failed level
  std::size_t good = 0;
  while (good < count && R.levels[good].ok) ++good;
  for (std::size_t k = 0; k + 1 < good; ++k)
    R.diffs.push_back(hat_difference(*trajs[k], *trajs[k + 1], opts));

  std::vector<double> values;
  for (std::size_t k = 0; k + 1 < good; ++k) values.push_back(levels[k]);
  R.orders_linf = estimate_order(R.diffs_linf(), values, R.noise_floor);
  R.orders_l2 = estimate_order(R.diffs_l2(), values, R.noise_floor);
  return R;
}

namespace {

void put_optional(std::ostream& os, const std::optional<double>& v) {
  if (v) os << *v;
  else os << "NA";
}

}  // namespace

void write_study_csv(std::ostream& os, const StudyReport& R) {
  os << "axis,level,eps,lambda,N,h,status,diff_linf_h,diff_l2_vstar,"
        "order_linf_h,order_l2_vstar";
  for (int k = 1; k <= 12; ++k) os << ",q" << k;
  os << '\n' << std::setprecision(17);
  for (std::size_t k = 0; k < R.levels.size(); ++k) {
    const StudyLevel& L = R.levels[k];
    os << to_string(R.axis) << ',' << L.value << ',' << L.params.eps << ','
       << L.params.lambda << ',' << L.params.N << ',' << L.params.h() << ','
       << (L.ok ? "ok" : "failed") << ',';
    if (k < R.diffs.size()) os << R.diffs[k].linf_h << ',' << R.diffs[k].l2_vstar;
    else os << "NA,NA";
    os << ',';
    put_optional(os, k < R.orders_linf.size() ? R.orders_linf[k] : std::nullopt);
    os << ',';
    put_optional(os, k < R.orders_l2.size() ? R.orders_l2[k] : std::nullopt);
    for (double q : L.ledger.q) {
      os << ',';
      if (L.ok) os << q;
      else os << "NA";
    }
    os << '\n';
  }
}

void write_study_summary(std::ostream& os, const StudyReport& R) {
  os << "study along " << to_string(R.axis) << " with " << R.levels.size()
     << " levels\n" << std::setprecision(6);
  for (std::size_t k = 0; k < R.levels.size(); ++k) {
    const StudyLevel& L = R.levels[k];
    os << "  level " << k << ": " << to_string(R.axis) << " = " << L.value;
    if (!L.ok) {
      os << "  FAILED: " << L.error << '\n';
      continue;
    }
    if (k < R.diffs.size()) {
      os << "  |d|_Linf(H) = " << R.diffs[k].linf_h
         << "  |d|_L2(V*) = " << R.diffs[k].l2_vstar;
      if (k < R.orders_linf.size() && R.orders_linf[k])
        os << "  order = " << *R.orders_linf[k];
    }
    os << '\n';
  }
  os << "differences are Cauchy differences between consecutive levels; "
        "monotone decrease is an empirical observation, not a proven rate\n";
}

}  // namespace chemo
