#pragma once

#include <span>
#include <vector>

namespace pathwise {

/// Shared finite-resolution proxy for "the limit along the partition
/// sequence exists". Every report in the library uses it.
///
/// A sequence of per-level approximations is declared converged when
///   - at every probe, |top - (top-1)| < tol * max(1, |top|), and
///   - (if require_monotone) the level-to-level gaps did not grow over the
///     last three levels.
struct ConvergenceOptions {
  double tol = 1e-3;
  bool require_monotone = true;
};

struct ConvergenceAssessment {
  bool converged = false;
  /// max over probes of |top - (top-1)|
  double metric = 0.0;
  /// gap[k] = max over probes of |level[k+1] - level[k]|
  std::vector<double> level_gaps;
};

/// `per_level[k][p]` is the approximation at level k and probe p. At least
/// two levels are required.
ConvergenceAssessment assess_convergence(std::span<const std::vector<double>> per_level,
                                         const ConvergenceOptions& options);

}  // namespace pathwise
