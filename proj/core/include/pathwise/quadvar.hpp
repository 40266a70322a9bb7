#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "pathwise/convergence.hpp"
#include "pathwise/linalg.hpp"
#include "pathwise/partitions.hpp"
#include "pathwise/paths.hpp"

namespace pathwise {

struct QVOptions {
  ConvergenceOptions convergence;
  /// Empty means the level-6 dyadic grid of [0, T] plus every jump time.
  std::vector<double> probe_times;
  /// Lowest level kept in the per-level table. The top level is always the
  /// finest level of the sequence.
  int first_level = 0;
};

/// Probe set used when none is given: i*T/64 plus the path's jump times.
std::vector<double> default_probe_times(const SampledPath& path);

/// A^n(t) = Σ_i (x(t^n_{i+1} ∧ t) - x(t^n_i ∧ t))² on level `level` for every
/// time of the path grid. Scalar paths only.
std::vector<double> qv_curve(const SampledPath& path, std::span<const double> level);
/// Same sum evaluated at arbitrary times in [0, T].
std::vector<double> qv_at(const SampledPath& path, std::span<const double> level,
                          std::span<const double> times);

struct QVReport {
  std::vector<int> levels;
  std::vector<double> probe_times;
  /// per_level[k][p] = A^{levels[k]}(probe_times[p])
  std::vector<std::vector<double>> per_level;
  /// Top-level values at the probes.
  std::vector<double> limit;
  std::vector<double> continuous_part;
  /// Σ_{s <= t} Δx(s)²
  std::vector<double> jump_part;
  ConvergenceAssessment convergence;
  /// True when the partition had to be refined with the path's jump times.
  bool refined = false;

  bool converged() const { return convergence.converged; }
  double convergence_metric() const { return convergence.metric; }
};

/// Quadratic variation of a scalar path along `seq`. Jump times missing from
/// the partition are added to every level first. Throws std::invalid_argument
/// for d > 1 or when fewer than two levels are available.
QVReport qv_along(const SampledPath& path, const PartitionSequence& seq,
                  const QVOptions& options = {});

struct QVMatrixReport {
  std::vector<int> levels;
  std::vector<double> probe_times;
  /// per_level[k][p] is the d×d matrix at level levels[k], probe p.
  std::vector<std::vector<Matrix>> per_level;
  std::vector<Matrix> limit;
  std::vector<Matrix> continuous_part;
  /// Σ_{s <= t} Δx(s) Δx(s)ᵀ
  std::vector<Matrix> jump_part;
  ConvergenceAssessment convergence;
  bool refined = false;
};

/// Matrix quadratic variation. Entry (i, j) is the truncated sum of Δx^i Δx^j,
/// which equals ½([x^i + x^j] - [x^i] - [x^j]) level by level. Needs d >= 2.
QVMatrixReport qv_matrix(const SampledPath& path, const PartitionSequence& seq,
                         const QVOptions& options = {});

/// Continuous part [x]^c on the path grid, from the top level: the running
/// sum of squared finest increments minus squared jumps. Scalar paths.
std::vector<double> continuous_qv_curve(const SampledPath& path);

enum class PVariationMode { exact_dp, along_levels };

/// Exact mode: sup over all sub-partitions of the sample points containing
/// both endpoints, by dynamic programming (at most 4096 points). Level mode:
/// max over the levels of `seq` of the level sums, a lower bound.
double p_variation(const SampledPath& path, double p, PVariationMode mode,
                   const PartitionSequence* seq = nullptr);
/// Σ |x(t_{i+1}) - x(t_i)|^p over the given times.
double p_variation_sum(const SampledPath& path, double p, std::span<const double> times);

struct VariationIndexEstimate {
  /// Smallest grid p whose level sums stay bounded; +inf when none does.
  double estimate = std::numeric_limits<double>::infinity();
  std::vector<double> p_grid;
  /// Least-squares slope of log2 s_p against level over the trailing levels.
  std::vector<double> slopes;
  double slope_threshold = 0.125;
  /// Always set: a finite prefix of levels can only suggest the index.
  bool finite_resolution = true;
};

VariationIndexEstimate variation_index_estimate(const SampledPath& path,
                                                const PartitionSequence& seq,
                                                std::span<const double> p_grid,
                                                int trailing_levels = 4,
                                                double slope_threshold = 0.125);

struct Interval {
  double start = 0.0;
  double end = 0.0;
};

struct NorvaisaJumpCheck {
  double time = 0.0;
  double delta_minus_h = 0.0;
  /// (Δ⁻x)²
  double expected_minus = 0.0;
  double delta_plus_h = 0.0;
  /// Allowed |Δ⁻H - (Δ⁻x)²| from the movement of x inside the last finest cell.
  double bound = 0.0;
  bool holds = false;
};

struct NorvaisaReport {
  std::vector<Interval> intervals;
  std::vector<int> levels;
  /// values[k][j] = s_2 over level levels[k] refined to interval j
  std::vector<std::vector<double>> values;
  std::vector<double> cauchy_gaps;
  /// |s_2([s,t]) - (H(t) - H(s))| at the top level
  std::vector<double> additivity_gaps;
  std::vector<NorvaisaJumpCheck> jumps;
  bool converged = false;
};

/// Interval form of the quadratic variation: sums over {s} ∪ (λ_n ∩ (s,t)) ∪ {t}.
/// Requires a nested sequence.
NorvaisaReport norvaisa_qv_check(const SampledPath& path, const PartitionSequence& seq,
                                 std::span<const Interval> intervals,
                                 const ConvergenceOptions& options = {});

struct VovkReport {
  std::vector<int> levels;
  /// sup over the path grid of |A^n(t) - A^top(t)|
  std::vector<double> sup_gaps;
  bool uniform = false;
  /// max |A^n(t) - Σ_{t_i <= t}(x(t_{i+1}) - x(t_i))² - boundary terms| over
  /// sampled t and all levels
  double boundary_identity_error = 0.0;
  std::size_t boundary_samples = 0;
};

/// Uniform-in-time convergence of the t-truncated sums, plus the identity
/// relating them to untruncated sums through the two incomplete-cell terms.
VovkReport vovk_uniform_check(const SampledPath& path, const PartitionSequence& seq,
                              const ConvergenceOptions& options = {},
                              std::uint64_t sample_seed = 1, std::size_t samples = 64);

}  // namespace pathwise
