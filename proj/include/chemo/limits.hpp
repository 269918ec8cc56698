#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "chemo/diagnostics.hpp"
#include "chemo/scheme.hpp"

namespace chemo {

enum class StudyAxis { h, lambda, epsilon };

std::string to_string(StudyAxis a);
StudyAxis study_axis_from_string(const std::string& name);

/// Norms of u_hat_a - u_hat_b, both piecewise linear in time. Breakpoints
/// of the two trajectories are merged, so the norms are exact.
struct HatDifference {
  double linf_h = 0.0;    // sup_t |e(t)|_H
  double l2_vstar = 0.0;  // (int_0^T |e(t)|_{V*}^2 dt)^{1/2}
};

HatDifference hat_difference(const Trajectory& a, const Trajectory& b,
                             const SolverOptions& opts = {});

/// order_k = log(d_k / d_{k+1}) / log(ratio); nullopt when either diff is at
/// or below the noise floor.
std::vector<std::optional<double>> estimate_order(const std::vector<double>& diffs,
                                                  double noise_floor,
                                                  double ratio = 2.0);
/// Same with per-pair ratios level_k / level_{k+1}.
std::vector<std::optional<double>> estimate_order(const std::vector<double>& diffs,
                                                  const std::vector<double>& levels,
                                                  double noise_floor);

struct StudyLevel {
  double value = 0.0;  // h, lambda or eps
  SimParams params;
  bool ok = false;
  std::string error;
  DiagnosticsLedger ledger;
};

struct StudyReport {
  StudyAxis axis = StudyAxis::h;
  std::vector<StudyLevel> levels;
  /// diffs between consecutive successful levels k, k+1
  std::vector<HatDifference> diffs;
  std::vector<std::optional<double>> orders_linf;
  std::vector<std::optional<double>> orders_l2;
  double noise_floor = 0.0;

  std::vector<double> diffs_linf() const;
  std::vector<double> diffs_l2() const;
};

/// Parameters of a level. For the h axis the level is a step size (N is
/// T/h rounded); for the epsilon axis lambda is co-scaled as eps/10.
SimParams level_params(StudyAxis axis, const SimParams& base, double level);

/// Runs one trajectory per level (concurrently, up to `jobs` at a time) and
/// tabulates Cauchy differences and observed orders. Levels must be
/// strictly decreasing. A failed level truncates the table.
StudyReport study(StudyAxis axis, const Scenario& base,
                  const std::vector<double>& levels,
                  const SolverOptions& opts = {}, int jobs = 1);

void write_study_csv(std::ostream& os, const StudyReport& report);
void write_study_summary(std::ostream& os, const StudyReport& report);

}  // namespace chemo
