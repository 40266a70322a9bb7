#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pathwise/quadvar.hpp"
#include "pathwise/trading.hpp"

namespace pathwise {

namespace {

/// Σ_{j<k} a_j a_k where a_j are the level-n increments inside one coarse
/// cell, truncated at t.
class CrossSums {
 public:
  CrossSums(const SampledPath& path, std::span<const double> coarse, std::span<const double> fine)
      : path_(path), coarse_(coarse), fine_(fine) {
    xf_.reserve(fine.size());
    for (double t : fine) xf_.push_back(path.value_at(t)[0]);
    first_fine_.reserve(coarse.size());
    for (double t : coarse) {
      const auto it = std::lower_bound(fine.begin(), fine.end(), t);
      if (it == fine.end() || *it != t)
        throw std::invalid_argument("plausibility diagnostic needs nested partitions");
      first_fine_.push_back(static_cast<std::size_t>(it - fine.begin()));
    }
    complete_.assign(coarse.size(), 0.0);
    for (std::size_t i = 0; i + 1 < coarse.size(); ++i)
      complete_[i + 1] = complete_[i] + cell(i, coarse[i + 1], xf_[first_fine_[i + 1]]);
  }

  double at(double t) const {
    const auto it = std::upper_bound(coarse_.begin(), coarse_.end(), t);
    const std::size_t c = static_cast<std::size_t>(it - coarse_.begin()) - 1;
    if (c + 1 >= coarse_.size()) return complete_[c];
    return complete_[c] + cell(c, t, path_.value_at(t)[0]);
  }

 private:
  double cell(std::size_t i, double t, double xt) const {
    double before = 0.0;
    double sum = 0.0;
    for (std::size_t j = first_fine_[i]; j < first_fine_[i + 1]; ++j) {
      const double left = fine_[j] <= t ? xf_[j] : xt;
      const double right = fine_[j + 1] <= t ? xf_[j + 1] : xt;
      const double a = right - left;
      sum += before * a;
      before += a;
    }
    return sum;
  }

  const SampledPath& path_;
  std::span<const double> coarse_;
  std::span<const double> fine_;
  std::vector<double> xf_;
  std::vector<std::size_t> first_fine_;
  std::vector<double> complete_;
};

}  // namespace

PlausibilityReport plausibility_diagnostic(const SampledPath& path, const PartitionSequence& seq,
                                           const PlausibilityOptions& options) {
  if (path.dim() != 1)
    throw std::invalid_argument("plausibility diagnostic is only defined for scalar paths");
  if (!seq.nested()) throw std::invalid_argument("plausibility diagnostic needs nested partitions");
  if (seq.horizon() != path.horizon())
    throw std::invalid_argument("partition horizon differs from path horizon");
  const auto jt = path.jump_times();
  const PartitionSequence used = seq.covers(jt) ? seq : seq.refine_with(jt);
  const int first = std::max(0, options.first_level);
  if (used.top_level() - first < 1)
    throw std::invalid_argument("plausibility diagnostic needs at least two levels");

  PlausibilityReport r;
  if (options.probe_times.empty()) {
    r.probe_times.assign(path.grid().begin(), path.grid().end());
  } else {
    r.probe_times = options.probe_times;
  }
  const auto& times = r.probe_times;
  const double x0 = path.value(0, 0);
  std::vector<double> xt2(times.size());
  for (std::size_t p = 0; p < times.size(); ++p) {
    const double v = path.value_at(times[p])[0];
    xt2[p] = v * v - x0 * x0;
  }

  std::vector<double> prev = qv_at(path, used.level(first), times);
  double k_sum = 0.0;
  double cross_sum = 0.0;
  for (int n = first + 1; n <= used.top_level(); ++n) {
    const auto level = used.level(n);
    const auto a = qv_at(path, level, times);

    RealizedStrategy s;
    s.trading_times.assign(level.begin(), level.end());
    for (std::size_t i = 0; i + 1 < level.size(); ++i)
      s.holdings.push_back({-2.0 * path.value_at(level[i])[0]});
    const auto g = gain_curve(s, path, times);

    const CrossSums cross(path, used.level(n - 1), level);
    PlausibilityLevel row;
    row.level = n;
    std::vector<double> diff(times.size());
    for (std::size_t p = 0; p < times.size(); ++p) {
      diff[p] = a[p] - prev[p];
      const double c = cross.at(times[p]);
      row.identity_error = std::max(row.identity_error, std::abs(diff[p] - (-2.0 * c)));
      row.strategy_identity_error =
          std::max(row.strategy_identity_error, std::abs(a[p] - (xt2[p] + g[p])));
      row.k_n = std::max(row.k_n, std::max(0.0, -diff[p]));
      // The cross sum over ordered pairs j != k is twice the j < k sum.
      row.cross_negative_part = std::max(row.cross_negative_part, std::max(0.0, -2.0 * c));
    }
    row.min_slack = diff.empty() ? 0.0 : diff[0] + row.k_n;
    for (double d : diff) row.min_slack = std::min(row.min_slack, d + row.k_n);
    k_sum += row.k_n;
    cross_sum += row.cross_negative_part;
    row.k_partial_sum = k_sum;
    row.cross_partial_sum = cross_sum;
    r.levels.push_back(row);
    prev = a;
  }

  const std::size_t count = r.levels.size();
  const std::size_t tail = std::max<std::size_t>(1, count / 2);
  double tail_sum = 0.0;
  for (std::size_t k = count - tail; k < count; ++k) tail_sum += r.levels[k].k_n;
  r.tail_fraction = k_sum > 0.0 ? tail_sum / k_sum : 0.0;
  r.bounded = r.tail_fraction <= options.tail_fraction_threshold;
  return r;
}

}  // namespace pathwise
