// Batch driver: simulate, study-{h,lambda,epsilon}, validate, check-identities.

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <utility>

#include "chemo/config.hpp"
#include "chemo/diagnostics.hpp"
#include "chemo/limits.hpp"
#include "chemo/scheme.hpp"

namespace fs = std::filesystem;
using namespace chemo;

namespace {

constexpr int kExitChecksFailed = 1;
constexpr int kExitBadConfig = 2;
constexpr int kExitRunFailed = 3;

constexpr double kIdentityTol = 1e-10;

void write_trajectory_csv(std::ostream& os, const Trajectory& traj, int stride) {
  os << "t,node,u,mu,v\n" << std::setprecision(17);
  const int N = traj.params.N;
  for (int n = 0; n <= N; ++n) {
    if (n % stride != 0 && n != N) continue;
    const StepState& s = traj.states[n];
    for (std::size_t k = 0; k < s.u.size(); ++k)
      os << traj.time(n) << ',' << k << ',' << s.u[k] << ',' << s.mu[k] << ','
         << s.v[k] << '\n';
  }
}

void write_metadata(std::ostream& os, const ScenarioConfig& cfg,
                    const Trajectory& traj, const DiagnosticsLedger& ledger) {
  os << "# resolved configuration\n";
  write_config(os, cfg);
  os << "\n# run summary\n" << std::setprecision(17);
  os << "h = " << traj.h() << "\nsteps = " << traj.params.N << '\n';
  double worst = 0.0;
  for (double r : traj.step_residuals) worst = std::max(worst, r);
  os << "max_step_residual = " << worst << '\n';
  os << "m0 = " << mean(traj.states.front().u) << '\n';
  os << "\n# ledger\n";
  for (int k = 1; k <= 12; ++k) os << 'q' << k << " = " << ledger[k] << '\n';
}

int simulate(const ScenarioConfig& cfg, const fs::path& out) {
  const Scenario scenario = build_scenario(cfg);
  Trajectory traj;
  try {
    traj = run(scenario, cfg.solver);
  } catch (const RunFailure& e) {
    std::cerr << "run failed at step " << e.step_index << ": " << e.what() << '\n';
    return kExitRunFailed;
  }
  const DiagnosticsLedger ledger = build_ledger(traj, cfg.solver);
  fs::create_directories(out);
  {
    std::ofstream f(out / "trajectory.csv");
    write_trajectory_csv(f, traj, cfg.snapshot_stride);
  }
  {
    std::ofstream f(out / "ledger.csv");
    write_ledger_header(f);
    write_ledger_row(f, traj, ledger);
  }
  {
    std::ofstream f(out / "initial.csv");
    write_field_csv(f, traj.states.front().u);
  }
  {
    std::ofstream f(out / "run.meta");
    write_metadata(f, cfg, traj, ledger);
  }
  std::cout << "simulated " << traj.params.N << " steps; artifacts in " << out.string()
            << '\n';
  return 0;
}

int run_study(const ScenarioConfig& cfg, const std::string& axis_name,
              const fs::path& out, int jobs) {
  const StudyAxis axis = study_axis_from_string(axis_name);
  const std::vector<double> levels = study_levels(cfg, axis_name);
  const StudyReport report = study(axis, build_scenario(cfg), levels, cfg.solver, jobs);
  fs::create_directories(out);
  {
    std::ofstream f(out / ("study_" + to_string(axis) + ".csv"));
    write_study_csv(f, report);
  }
  write_study_summary(std::cout, report);
  const bool all_ok = std::all_of(report.levels.begin(), report.levels.end(),
                                  [](const StudyLevel& l) { return l.ok; });
  if (!all_ok) return kExitRunFailed;
  return 0;
}

int validate(const ScenarioConfig& cfg) {
  const Scenario scenario = build_scenario(cfg);
  const SourceSeries g = config_source_density(cfg);
  const Field u0eps = initial_datum(scenario, cfg.solver);
  const ValidationReport report =
      validate_assumptions(cfg.beta, cfg.pi, u0eps, g.values);
  std::cout << std::setprecision(6);
  for (const auto& c : report.checks) {
    std::cout << c.name << ": " << (c.passed ? "pass" : "FAIL") << "  " << c.detail;
    if (!std::isnan(c.margin))
      std::cout << "  (margin " << c.margin << " at " << c.witness << ")";
    std::cout << '\n';
  }
  if (cfg.smooth_initial) {
    bool finite = true;
    InitialDataBounds b;
    try {
      b = initial_data_bounds(cfg.beta, scenario.u0, {1.0, 0.5, 0.25, 0.1, 0.05});
    } catch (const std::exception&) {
      finite = false;
    }
    std::cout << "A5 (smoothed family): " << (finite ? "pass" : "FAIL")
              << "  ceiling c4 = " << b.ceiling() << " (L4^4 " << b.l4_pow4
              << ", beta_hat " << b.beta_hat_integral << ", eps|grad|^2 "
              << b.eps_gradient << "), mean drift " << b.max_mean_drift << '\n';
    if (!finite) return kExitChecksFailed;
  }
  return report.all_passed() ? 0 : kExitChecksFailed;
}

int check_identities(const ScenarioConfig& cfg, std::uint64_t seed) {
  Scenario scenario = build_scenario(cfg);
  // short run: at most 32 steps at the configured h
  if (scenario.params.N > 32) {
    scenario.params.T = scenario.params.h() * 32;
    scenario.params.N = 32;
  }
  Trajectory traj;
  try {
    traj = run(scenario, cfg.solver);
  } catch (const RunFailure& e) {
    std::cerr << "run failed at step " << e.step_index << ": " << e.what() << '\n';
    return kExitRunFailed;
  }
  const IdentityReport r = check_identities(traj);
  const PtReport pt = check_pt_inequality(traj.grid(), traj.beta,
                                          {1e-1, 1e-3}, 100, seed);
  struct Row {
    const char* name;
    double value;
    bool pass;
  };
  const Row rows[] = {
      {"interpolant L2 identity (|u_bar-u_hat|^2 = h^2/3 |u_hat_t|^2)",
       r.interpolant_l2, r.interpolant_l2 <= kIdentityTol},
      {"interpolant jump identity (h u_hat_t = u_bar - u_under)",
       r.interpolant_jump, r.interpolant_jump <= kIdentityTol},
      {"per-step energy identity", r.energy, r.energy <= kIdentityTol},
      {"per-step conservation", r.conservation, r.conservation <= kIdentityTol},
      {"subdifferential inequality (min slack)", r.subdifferential,
       r.subdifferential >= -kIdentityTol},
      {"PT inequality (min normalized pairing)", pt.min_normalized,
       pt.min_normalized >= -1e-12},
  };
  bool all = true;
  std::cout << std::setprecision(3) << std::scientific;
  for (const auto& row : rows) {
    std::cout << (row.pass ? "PASS  " : "FAIL  ") << std::setw(11) << row.value
              << "  " << row.name << '\n';
    all = all && row.pass;
  }
  return all ? 0 : kExitChecksFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Time-discrete Cahn-Hilliard chemotaxis solver"};
  app.require_subcommand(1);
  std::string config_path;
  std::string out_dir;
  int jobs = 1;
  std::uint64_t seed = 42;
  app.add_option("--config", config_path, "scenario file")->required();
  app.add_option("--out", out_dir, "output directory (default from config)");
  app.add_option("--jobs", jobs, "worker threads for studies")->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "seed for random property checks");
  app.fallthrough();

  const std::pair<const char*, const char*> commands[] = {
      {"simulate", "run one trajectory and write CSV artifacts"},
      {"study-h", "refine the time step and tabulate differences"},
      {"study-lambda", "shrink lambda and tabulate differences"},
      {"study-epsilon", "shrink eps (lambda = eps/10) and tabulate differences"},
      {"validate", "check the structural assumptions on beta, pi, f and u0"},
      {"check-identities", "verify the discrete identities on a short run"}};
  for (const auto& [name, help] : commands) app.add_subcommand(name, help);

  CLI11_PARSE(app, argc, argv);
  const std::string command = app.get_subcommands().front()->get_name();

  ScenarioConfig cfg;
  try {
    cfg = load_config(config_path);
  } catch (const ConfigError& e) {
    std::cerr << e.what() << '\n';
    return kExitBadConfig;
  }
  const fs::path out = out_dir.empty() ? fs::path(cfg.output_directory) : fs::path(out_dir);

  try {
    if (command == "simulate") return simulate(cfg, out);
    if (command == "study-h") return run_study(cfg, "h", out, jobs);
    if (command == "study-lambda") return run_study(cfg, "lambda", out, jobs);
    if (command == "study-epsilon") return run_study(cfg, "epsilon", out, jobs);
    if (command == "validate") return validate(cfg);
    return check_identities(cfg, seed);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRunFailed;
  }
}
