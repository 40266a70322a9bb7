#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "pathwise/linalg.hpp"
#include "pathwise/partitions.hpp"

namespace pathwise {

struct Jump {
  double time = 0.0;
  Vector size;
};

/// A d-dimensional càdlàg path sampled on a finest time grid.
///
/// values(i) is x(t_i), the right-continuous value. Jumps are explicit: a
/// grid time without a recorded jump is treated as a continuity point, so its
/// left limit equals its value. Between grid points the path holds the value
/// of the left grid point.
class SampledPath {
 public:
  SampledPath() = default;
  /// `values` is row-major, one row of `dim` numbers per grid time. Every jump
  /// time must be a grid time other than 0.
  SampledPath(std::vector<double> grid, std::size_t dim, std::vector<double> values,
              std::vector<Jump> jumps = {});

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return grid_.size(); }
  double horizon() const { return grid_.back(); }
  std::span<const double> grid() const { return grid_; }
  double time(std::size_t i) const { return grid_[i]; }

  std::span<const double> value(std::size_t i) const { return {&values_[i * dim_], dim_}; }
  double value(std::size_t i, std::size_t c) const { return values_[i * dim_ + c]; }
  /// x(t_i-) = x(t_i) - Δx(t_i). At t_0 this is x(0).
  Vector left_limit(std::size_t i) const;
  double left_limit(std::size_t i, std::size_t c) const;
  bool has_jump(std::size_t i) const { return jump_slot_[i] >= 0; }
  /// Δx(t_i), zero when there is no jump.
  Vector jump(std::size_t i) const;
  const std::vector<Jump>& jumps() const { return jumps_; }
  std::vector<double> jump_times() const;
  /// Grid indices carrying a jump, increasing.
  std::vector<std::size_t> jump_indices() const;

  /// Largest i with t_i <= t; t must lie in [0, T].
  std::size_t index_at_or_before(double t) const;
  /// Exact grid lookup; returns size() when t is not a grid time.
  std::size_t index_of(double t) const;

  /// x(t) with the càdlàg convention.
  Vector value_at(double t) const;
  /// x(t-). Off-grid this is the left grid value; at 0 it is x(0).
  Vector left_limit_at(double t) const;

  /// ∫_0^t x_c(s) ds where each finest cell [t_i, t_{i+1}) contributes
  /// x_c(t_{i+1}-)·(t_{i+1} - t_i). This is the exact integral of the finest
  /// stepwise approximation and only reads the path strictly before t.
  double running_integral(double t, std::size_t c) const;

  /// Scalar path t -> Σ_c w_c x_c(t), jumps combined the same way.
  SampledPath combination(std::span<const double> weights) const;
  SampledPath coordinate(std::size_t c) const;

 private:
  void build_indices();

  std::vector<double> grid_;
  std::size_t dim_ = 0;
  std::vector<double> values_;
  std::vector<Jump> jumps_;
  std::vector<int> jump_slot_;
  /// prefix_[i*dim + c] = running integral of coordinate c up to t_i
  std::vector<double> prefix_;
};

enum class Side { right, left };

/// The stopped path x_t (side right) or x_{t-} (side left), optionally
/// perturbed vertically by δ from the stop time on, and optionally extended
/// horizontally: the functional is then evaluated at time() >= stop_time()
/// on the path frozen at stop_time().
///
/// This is a view. The base path must outlive it.
class StoppedPath {
 public:
  StoppedPath(const SampledPath& base, double stop_time, Side side);

  const SampledPath& base() const { return *base_; }
  std::size_t dim() const { return base_->dim(); }
  double horizon() const { return base_->horizon(); }
  /// Evaluation time t of F(t, ·).
  double time() const { return time_; }
  /// Time from which the path is frozen.
  double stop_time() const { return stop_time_; }
  Side side() const { return side_; }
  std::span<const double> shift() const { return shift_; }

  /// Path value at u in [0, T].
  Vector value_at(double u) const;
  /// The frozen value x(t) or x(t-), plus the shift.
  const Vector& current() const { return frozen_; }
  double current(std::size_t c) const { return frozen_[c]; }
  /// ∫_0^{time()} of coordinate c of this stopped path.
  double running_integral(std::size_t c) const;

  /// Vertical perturbation by δ, added to any existing shift.
  StoppedPath perturbed(std::span<const double> delta) const;
  /// Horizontal extension: same frozen path, evaluated at a later time.
  StoppedPath extended(double new_time) const;

 private:
  const SampledPath* base_;
  double stop_time_;
  double time_;
  Side side_;
  Vector shift_;
  Vector frozen_;
};

StoppedPath stop(const SampledPath& path, double t, Side side = Side::right);
StoppedPath vertical_perturbation(const StoppedPath& sp, std::span<const double> delta);

/// x^n = Σ_i x(t^n_{i+1}-) 1_{[t^n_i, t^n_{i+1})} + x(T) 1_{{T}}, realized on
/// the path's own grid with jumps at the level-n times where it changes.
/// Level n must be a subset of the path grid and contain every jump time.
SampledPath stepwise_approximation(const SampledPath& path, const PartitionSequence& seq, int n);

/// sup_u |a(u ∧ t) - b(u ∧ t')| + |t - t'| with the Euclidean norm, over the
/// union of both grids and stop times.
double d_infinity(const StoppedPath& a, const StoppedPath& b);

}  // namespace pathwise
