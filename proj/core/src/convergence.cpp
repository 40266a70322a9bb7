#include "pathwise/convergence.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pathwise {

ConvergenceAssessment assess_convergence(std::span<const std::vector<double>> per_level,
                                         const ConvergenceOptions& options) {
  if (per_level.size() < 2)
    throw std::invalid_argument("convergence assessment needs at least two levels");
  const std::size_t probes = per_level.front().size();
  for (const auto& level : per_level)
    if (level.size() != probes) throw std::invalid_argument("ragged per-level table");

  ConvergenceAssessment out;
  out.level_gaps.reserve(per_level.size() - 1);
  for (std::size_t k = 0; k + 1 < per_level.size(); ++k) {
    double gap = 0.0;
    for (std::size_t p = 0; p < probes; ++p)
      gap = std::max(gap, std::abs(per_level[k + 1][p] - per_level[k][p]));
    out.level_gaps.push_back(gap);
  }
  out.metric = out.level_gaps.back();

  const auto& top = per_level.back();
  const auto& prev = per_level[per_level.size() - 2];
  bool within = true;
  for (std::size_t p = 0; p < probes; ++p) {
    const double allowed = options.tol * std::max(1.0, std::abs(top[p]));
    if (!(std::abs(top[p] - prev[p]) < allowed)) within = false;
  }

  bool monotone = true;
  if (options.require_monotone && out.level_gaps.size() >= 2) {
    const std::size_t n = out.level_gaps.size();
    monotone = out.level_gaps[n - 1] <= out.level_gaps[n - 2];
  }
  out.converged = within && monotone;
  return out;
}

}  // namespace pathwise
