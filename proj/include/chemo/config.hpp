#pragma once

#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "chemo/elliptic.hpp"
#include "chemo/grid.hpp"
#include "chemo/nonlinearity.hpp"
#include "chemo/params.hpp"
#include "chemo/scheme.hpp"

namespace chemo {

/// Scenario description read from an INI-style document:
///
///   [grid]     d, n
///   [params]   eps, lambda, N, T, eta, c3
///   [beta]     family (linear|power|logit|abs_logit), m, c1, c2
///   [pi]       family (zero|tanh_decay)
///   [initial]  preset (constant|cosine|bump|csv), value, amplitude, k,
///              path, smooth (true|false)
///   [source]   preset (zero|cosine_g|csv), amplitude, k, path
///   [solver]   lin_tol, newton_tol, max_newton, tau_schedule (comma list
///              of multiples of h)
///   [output]   directory, stride
///   [study]    h_levels (step counts N), lambda_levels, eps_levels
///
/// Lines starting with '#' or ';' are comments.
struct ScenarioConfig {
  int d = 1;
  int n = 64;
  SimParams params;
  BetaSpec beta = power_beta(3.0);
  PiSpec pi;

  std::string initial_preset = "cosine";
  double initial_value = 0.0;
  double initial_amplitude = 0.5;
  int initial_k = 1;
  std::string initial_path;
  bool smooth_initial = true;

  std::string source_preset = "zero";
  double source_amplitude = 1.0;
  int source_k = 1;
  std::string source_path;

  SolverOptions solver;

  std::string output_directory = "out";
  int snapshot_stride = 1;

  std::vector<int> h_levels;
  std::vector<double> lambda_levels;
  std::vector<double> eps_levels;
};

class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(std::vector<std::string> violations);
  std::vector<std::string> violations;
};

/// Parses and validates; throws ConfigError listing every violation.
ScenarioConfig parse_config(const std::string& text);
ScenarioConfig load_config(const std::string& path);

/// Canonical dump of the resolved configuration (same grammar).
void write_config(std::ostream& os, const ScenarioConfig& cfg);

Grid config_grid(const ScenarioConfig& cfg);
Field config_initial(const ScenarioConfig& cfg);

/// Source density g as a piecewise-constant series (start times, fields).
struct SourceSeries {
  std::vector<double> starts;
  std::vector<Field> values;
};
SourceSeries config_source_density(const ScenarioConfig& cfg);

/// Scenario with f obtained from g through the mean-zero Neumann potential.
Scenario build_scenario(const ScenarioConfig& cfg);

std::vector<double> study_levels(const ScenarioConfig& cfg, const std::string& axis);

}  // namespace chemo
