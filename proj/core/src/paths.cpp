#include "pathwise/paths.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "pathwise/errors.hpp"

namespace pathwise {

SampledPath::SampledPath(std::vector<double> grid, std::size_t dim, std::vector<double> values,
                         std::vector<Jump> jumps)
    : grid_(std::move(grid)), dim_(dim), values_(std::move(values)), jumps_(std::move(jumps)) {
  if (dim_ == 0) throw std::invalid_argument("path dimension must be positive");
  if (grid_.size() < 2) throw std::invalid_argument("path grid needs at least two times");
  if (grid_.front() != 0.0) throw std::invalid_argument("path grid must start at 0");
  if (std::adjacent_find(grid_.begin(), grid_.end(), std::greater_equal<>()) != grid_.end())
    throw std::invalid_argument("path grid must be strictly increasing");
  if (values_.size() != grid_.size() * dim_)
    throw std::invalid_argument("path values do not match grid size times dimension");
  std::sort(jumps_.begin(), jumps_.end(),
            [](const Jump& a, const Jump& b) { return a.time < b.time; });
  build_indices();
}

void SampledPath::build_indices() {
  jump_slot_.assign(grid_.size(), -1);
  for (std::size_t s = 0; s < jumps_.size(); ++s) {
    const auto& j = jumps_[s];
    if (j.size.size() != dim_) throw std::invalid_argument("jump size has wrong dimension");
    const std::size_t i = index_of(j.time);
    if (i == grid_.size())
      throw std::invalid_argument("jump time " + std::to_string(j.time) +
                                  " is not a grid time; refine the partition with it");
    if (i == 0) throw std::invalid_argument("a jump at time 0 has no left limit");
    if (jump_slot_[i] >= 0) throw std::invalid_argument("duplicate jump time");
    jump_slot_[i] = static_cast<int>(s);
  }

  prefix_.assign(grid_.size() * dim_, 0.0);
  for (std::size_t i = 0; i + 1 < grid_.size(); ++i) {
    const double dt = grid_[i + 1] - grid_[i];
    for (std::size_t c = 0; c < dim_; ++c)
      prefix_[(i + 1) * dim_ + c] = prefix_[i * dim_ + c] + left_limit(i + 1, c) * dt;
  }
}

Vector SampledPath::left_limit(std::size_t i) const {
  Vector out(value(i).begin(), value(i).end());
  if (has_jump(i)) {
    const auto& dx = jumps_[static_cast<std::size_t>(jump_slot_[i])].size;
    for (std::size_t c = 0; c < dim_; ++c) out[c] -= dx[c];
  }
  return out;
}

double SampledPath::left_limit(std::size_t i, std::size_t c) const {
  const double v = value(i, c);
  return has_jump(i) ? v - jumps_[static_cast<std::size_t>(jump_slot_[i])].size[c] : v;
}

Vector SampledPath::jump(std::size_t i) const {
  if (!has_jump(i)) return Vector(dim_, 0.0);
  return jumps_[static_cast<std::size_t>(jump_slot_[i])].size;
}

std::vector<double> SampledPath::jump_times() const {
  std::vector<double> out;
  out.reserve(jumps_.size());
  for (const auto& j : jumps_) out.push_back(j.time);
  return out;
}

std::vector<std::size_t> SampledPath::jump_indices() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < grid_.size(); ++i)
    if (has_jump(i)) out.push_back(i);
  return out;
}

std::size_t SampledPath::index_at_or_before(double t) const {
  if (!(t >= 0.0 && t <= horizon()))
    throw std::out_of_range("time " + std::to_string(t) + " outside the path horizon");
  const auto it = std::upper_bound(grid_.begin(), grid_.end(), t);
  return static_cast<std::size_t>(it - grid_.begin()) - 1;
}

std::size_t SampledPath::index_of(double t) const {
  const auto it = std::lower_bound(grid_.begin(), grid_.end(), t);
  if (it == grid_.end() || *it != t) return grid_.size();
  return static_cast<std::size_t>(it - grid_.begin());
}

Vector SampledPath::value_at(double t) const {
  const auto v = value(index_at_or_before(t));
  return Vector(v.begin(), v.end());
}

Vector SampledPath::left_limit_at(double t) const {
  const std::size_t i = index_at_or_before(t);
  if (grid_[i] == t) return left_limit(i);
  const auto v = value(i);
  return Vector(v.begin(), v.end());
}

double SampledPath::running_integral(double t, std::size_t c) const {
  const std::size_t i = index_at_or_before(t);
  const double base = prefix_[i * dim_ + c];
  if (grid_[i] == t) return base;
  // Off-grid partial cell: x(t-) is the left grid value.
  return base + value(i, c) * (t - grid_[i]);
}

SampledPath SampledPath::combination(std::span<const double> weights) const {
  if (weights.size() != dim_) throw std::invalid_argument("combination: weight count mismatch");
  std::vector<double> vals(grid_.size());
  for (std::size_t i = 0; i < grid_.size(); ++i) vals[i] = dot(value(i), weights);
  std::vector<Jump> js;
  for (const auto& j : jumps_) js.push_back({j.time, {dot(j.size, weights)}});
  return SampledPath(grid_, 1, std::move(vals), std::move(js));
}

SampledPath SampledPath::coordinate(std::size_t c) const {
  if (c >= dim_) throw std::out_of_range("coordinate index out of range");
  Vector w(dim_, 0.0);
  w[c] = 1.0;
  return combination(w);
}

StoppedPath::StoppedPath(const SampledPath& base, double stop_time, Side side)
    : base_(&base), stop_time_(stop_time), time_(stop_time), side_(side) {
  if (!(stop_time >= 0.0 && stop_time <= base.horizon()))
    throw std::out_of_range("stop time " + std::to_string(stop_time) + " outside [0, T]");
  frozen_ = side == Side::right ? base.value_at(stop_time) : base.left_limit_at(stop_time);
}

Vector StoppedPath::value_at(double u) const {
  if (!(u >= 0.0 && u <= horizon()))
    throw std::out_of_range("evaluation time outside [0, T]");
  if (u < stop_time_) return base_->value_at(u);
  return frozen_;
}

double StoppedPath::running_integral(std::size_t c) const {
  return base_->running_integral(stop_time_, c) + (time_ - stop_time_) * frozen_[c];
}

StoppedPath StoppedPath::perturbed(std::span<const double> delta) const {
  if (delta.size() != dim()) throw std::invalid_argument("perturbation has wrong dimension");
  StoppedPath out = *this;
  if (out.shift_.empty()) out.shift_.assign(dim(), 0.0);
  for (std::size_t c = 0; c < dim(); ++c) {
    out.shift_[c] += delta[c];
    out.frozen_[c] += delta[c];
  }
  return out;
}

StoppedPath StoppedPath::extended(double new_time) const {
  if (!(new_time >= time_ && new_time <= horizon()))
    throw std::out_of_range("horizontal extension must stay within [t, T]");
  StoppedPath out = *this;
  out.time_ = new_time;
  return out;
}

StoppedPath stop(const SampledPath& path, double t, Side side) { return {path, t, side}; }

StoppedPath vertical_perturbation(const StoppedPath& sp, std::span<const double> delta) {
  return sp.perturbed(delta);
}

SampledPath stepwise_approximation(const SampledPath& path, const PartitionSequence& seq, int n) {
  const auto level = seq.level(n);
  if (level.back() != path.horizon())
    throw std::invalid_argument("partition horizon differs from path horizon");
  std::vector<std::size_t> idx(level.size());
  for (std::size_t i = 0; i < level.size(); ++i) {
    idx[i] = path.index_of(level[i]);
    if (idx[i] == path.size())
      throw std::invalid_argument("level " + std::to_string(n) +
                                  " is not a subset of the path grid");
  }
  for (const auto& j : path.jumps())
    if (!seq.contains(n, j.time))
      throw PreconditionViolation("jump at " + std::to_string(j.time) +
                                  " is not a point of level " + std::to_string(n));

  const std::size_t d = path.dim();
  std::vector<double> vals(path.size() * d);
  std::vector<Jump> jumps;
  Vector prev_left = path.left_limit(idx[1]);
  for (std::size_t i = 0; i + 1 < level.size(); ++i) {
    const Vector step = path.left_limit(idx[i + 1]);
    for (std::size_t j = idx[i]; j < idx[i + 1]; ++j)
      std::copy(step.begin(), step.end(), vals.begin() + static_cast<std::ptrdiff_t>(j * d));
    if (i > 0) {
      Vector dx = subtract(step, prev_left);
      if (std::any_of(dx.begin(), dx.end(), [](double v) { return v != 0.0; }))
        jumps.push_back({level[i], std::move(dx)});
    }
    prev_left = step;
  }
  const auto last = path.value(path.size() - 1);
  std::copy(last.begin(), last.end(), vals.end() - static_cast<std::ptrdiff_t>(d));
  Vector dx = subtract(last, prev_left);
  if (std::any_of(dx.begin(), dx.end(), [](double v) { return v != 0.0; }))
    jumps.push_back({path.horizon(), std::move(dx)});
  return SampledPath(std::vector<double>(path.grid().begin(), path.grid().end()), d,
                     std::move(vals), std::move(jumps));
}

double d_infinity(const StoppedPath& a, const StoppedPath& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("d_infinity: dimension mismatch");
  std::vector<double> points(a.base().grid().begin(), a.base().grid().end());
  points.insert(points.end(), b.base().grid().begin(), b.base().grid().end());
  points.push_back(a.stop_time());
  points.push_back(b.stop_time());
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());

  const double ta = a.horizon();
  const double tb = b.horizon();
  double sup = 0.0;
  for (double u : points) {
    const Vector va = a.value_at(std::min(u, ta));
    const Vector vb = b.value_at(std::min(u, tb));
    sup = std::max(sup, norm(subtract(va, vb)));
  }
  return sup + std::abs(a.time() - b.time());
}

}  // namespace pathwise
