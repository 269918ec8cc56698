#pragma once

#include <string>
#include <vector>

namespace chemo {

/// Parameter tuple of the time-discrete scheme.
struct SimParams {
  double eps = 0.1;
  double lambda = 0.01;
  int N = 32;
  double T = 0.1;
  double eta = 0.0;
  double c3 = 0.0;

  double h() const { return T / N; }
  /// Upper bound for h: lambda / (2 c3 eps), unbounded when c3 = 0.
  double max_step() const;
  /// Every violated invariant, empty when valid.
  std::vector<std::string> violations() const;
  /// Throws std::invalid_argument listing all violations.
  void validate() const;
};

}  // namespace chemo
