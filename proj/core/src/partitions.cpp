#include "pathwise/partitions.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace pathwise {

namespace {

bool strictly_increasing(const std::vector<double>& v) {
  return std::adjacent_find(v.begin(), v.end(), std::greater_equal<>()) == v.end();
}

bool is_subset(const std::vector<double>& small, const std::vector<double>& big) {
  return std::includes(big.begin(), big.end(), small.begin(), small.end());
}

}  // namespace

PartitionSequence PartitionSequence::dyadic(double horizon, int max_level) {
  if (!(horizon > 0.0) || !std::isfinite(horizon))
    throw std::invalid_argument("dyadic partition: horizon must be positive");
  if (max_level < 1) throw std::invalid_argument("dyadic partition: max_level must be >= 1");
  if (max_level > 30) throw std::invalid_argument("dyadic partition: max_level above 30");

  PartitionSequence seq;
  seq.horizon_ = horizon;
  seq.kind_ = Kind::dyadic;
  seq.dyadic_max_level_ = max_level;
  seq.dense_ = true;
  seq.nested_ = true;
  seq.levels_.reserve(static_cast<std::size_t>(max_level) + 1);
  for (int n = 0; n <= max_level; ++n) {
    const std::size_t cells = std::size_t{1} << n;
    std::vector<double> grid(cells + 1);
    for (std::size_t i = 0; i <= cells; ++i)
      grid[i] = std::ldexp(static_cast<double>(i) * horizon, -n);
    grid.back() = horizon;
    seq.levels_.push_back(std::move(grid));
  }
  seq.validate();
  return seq;
}

PartitionSequence PartitionSequence::from_levels(double horizon,
                                                 std::vector<std::vector<double>> levels,
                                                 bool dense) {
  if (!(horizon > 0.0) || !std::isfinite(horizon))
    throw std::invalid_argument("partition: horizon must be positive");
  if (levels.empty()) throw std::invalid_argument("partition: no levels given");
  PartitionSequence seq;
  seq.horizon_ = horizon;
  seq.kind_ = Kind::explicit_levels;
  seq.levels_ = std::move(levels);
  seq.dense_ = dense;
  seq.nested_ = true;
  for (std::size_t n = 0; n + 1 < seq.levels_.size(); ++n)
    if (!is_subset(seq.levels_[n], seq.levels_[n + 1])) seq.nested_ = false;
  seq.validate();
  return seq;
}

void PartitionSequence::validate() const {
  for (std::size_t n = 0; n < levels_.size(); ++n) {
    const auto& grid = levels_[n];
    if (grid.size() < 2) throw std::invalid_argument("partition level with fewer than two points");
    if (grid.front() != 0.0 || grid.back() != horizon_)
      throw std::invalid_argument("partition level " + std::to_string(n) +
                                  " must start at 0 and end at T");
    if (!strictly_increasing(grid))
      throw std::invalid_argument("partition level " + std::to_string(n) +
                                  " is not strictly increasing");
  }
  if (dense_ && levels_.size() > 1) {
    for (int n = 0; n + 1 < level_count(); ++n)
      if (mesh(n + 1) > mesh(n))
        throw std::invalid_argument("partition declared dense but mesh increases at level " +
                                    std::to_string(n + 1));
    if (!(mesh(top_level()) < mesh(0)))
      throw std::invalid_argument("partition declared dense but mesh does not decrease");
  }
}

PartitionSequence PartitionSequence::refine_with(std::span<const double> extra_times) const {
  std::vector<double> extra(extra_times.begin(), extra_times.end());
  for (double t : extra)
    if (!(t >= 0.0 && t <= horizon_))
      throw std::invalid_argument("refine_with: time " + std::to_string(t) + " outside [0,T]");
  std::sort(extra.begin(), extra.end());
  extra.erase(std::unique(extra.begin(), extra.end()), extra.end());

  PartitionSequence out = *this;
  if (extra.empty()) return out;
  for (auto& grid : out.levels_) {
    std::vector<double> merged;
    merged.reserve(grid.size() + extra.size());
    std::set_union(grid.begin(), grid.end(), extra.begin(), extra.end(),
                   std::back_inserter(merged));
    grid = std::move(merged);
  }
  std::vector<double> all_extra;
  std::set_union(extra_times_.begin(), extra_times_.end(), extra.begin(), extra.end(),
                 std::back_inserter(all_extra));
  out.extra_times_ = std::move(all_extra);
  return out;
}

std::span<const double> PartitionSequence::level(int n) const {
  if (n < 0 || n >= level_count())
    throw std::out_of_range("partition level " + std::to_string(n) + " does not exist");
  return levels_[static_cast<std::size_t>(n)];
}

double PartitionSequence::mesh(int n) const {
  const auto grid = level(n);
  double m = 0.0;
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) m = std::max(m, grid[i + 1] - grid[i]);
  return m;
}

std::size_t PartitionSequence::last_index_before(int n, double t) const {
  if (!(t > 0.0 && t <= horizon_))
    throw std::out_of_range("last_index_before: t must lie in (0, T]");
  const auto grid = level(n);
  const auto it = std::lower_bound(grid.begin(), grid.end(), t);
  return static_cast<std::size_t>(it - grid.begin()) - 1;
}

std::size_t PartitionSequence::last_index_at_or_before(int n, double t) const {
  if (!(t >= 0.0 && t <= horizon_))
    throw std::out_of_range("last_index_at_or_before: t must lie in [0, T]");
  const auto grid = level(n);
  const auto it = std::upper_bound(grid.begin(), grid.end(), t);
  return static_cast<std::size_t>(it - grid.begin()) - 1;
}

bool PartitionSequence::contains(int n, double t) const {
  const auto grid = level(n);
  return std::binary_search(grid.begin(), grid.end(), t);
}

bool PartitionSequence::covers(std::span<const double> times) const {
  for (int n = 0; n < level_count(); ++n)
    for (double t : times)
      if (!contains(n, t)) return false;
  return true;
}

}  // namespace pathwise
