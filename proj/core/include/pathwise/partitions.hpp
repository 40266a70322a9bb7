#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace pathwise {

/// A finite prefix of a sequence of partitions of [0, T].
///
/// Level n is a strictly increasing grid 0 = t_0 < ... < t_m = T. Grid
/// membership is exact: dyadic points are built as i*T/2^n, which keeps
/// level n bit-identical to the even points of level n+1, so nestedness is a
/// structural property and never needs an epsilon.
///
/// Density cannot be observed on a finite prefix. `dense()` is declared by the
/// constructor and only validated as a non-increasing mesh whose top level is
/// finer than level 0.
class PartitionSequence {
 public:
  enum class Kind { dyadic, explicit_levels };

  /// Levels 0..max_level with times i*T/2^n.
  static PartitionSequence dyadic(double horizon, int max_level);
  /// Arbitrary user grids. Nestedness is detected, density is declared.
  static PartitionSequence from_levels(double horizon, std::vector<std::vector<double>> levels,
                                       bool dense);

  /// Adds `extra_times` to every level (sorted, deduplicated). Used to make
  /// every jump time of a path a partition point.
  PartitionSequence refine_with(std::span<const double> extra_times) const;

  double horizon() const { return horizon_; }
  int level_count() const { return static_cast<int>(levels_.size()); }
  int top_level() const { return level_count() - 1; }
  std::span<const double> level(int n) const;
  std::span<const double> finest() const { return levels_.back(); }
  /// max_i |t_{i+1} - t_i| on level n
  double mesh(int n) const;
  bool dense() const { return dense_; }
  bool nested() const { return nested_; }

  /// k(t, n): the index with t^n_k < t <= t^n_{k+1}. Requires 0 < t <= T.
  std::size_t last_index_before(int n, double t) const;
  /// Largest index k with t^n_k <= t. Requires 0 <= t <= T.
  std::size_t last_index_at_or_before(int n, double t) const;
  bool contains(int n, double t) const;
  /// True when every level contains every time in `times`.
  bool covers(std::span<const double> times) const;

  Kind kind() const { return kind_; }
  /// Construction parameters, kept for the structured-text descriptor.
  int dyadic_max_level() const { return dyadic_max_level_; }
  std::span<const double> extra_times() const { return extra_times_; }
  const std::vector<std::vector<double>>& levels() const { return levels_; }

 private:
  PartitionSequence() = default;
  void validate() const;

  double horizon_ = 0.0;
  std::vector<std::vector<double>> levels_;
  bool dense_ = false;
  bool nested_ = false;
  Kind kind_ = Kind::explicit_levels;
  int dyadic_max_level_ = 0;
  std::vector<double> extra_times_;
};

}  // namespace pathwise
