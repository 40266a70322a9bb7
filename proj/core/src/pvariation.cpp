#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pathwise/quadvar.hpp"

namespace pathwise {

namespace {

constexpr std::size_t kMaxDpPoints = 4096;

void check_p(double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("p-variation needs p >= 1");
}

double level_sum(const SampledPath& path, double p, std::span<const double> times) {
  double s = 0.0;
  double prev = path.value_at(times[0])[0];
  for (std::size_t i = 1; i < times.size(); ++i) {
    const double v = path.value_at(times[i])[0];
    s += std::pow(std::abs(v - prev), p);
    prev = v;
  }
  return s;
}

}  // namespace

double p_variation_sum(const SampledPath& path, double p, std::span<const double> times) {
  check_p(p);
  if (path.dim() != 1) throw std::invalid_argument("p-variation needs a scalar path");
  if (times.size() < 2) return 0.0;
  return level_sum(path, p, times);
}

double p_variation(const SampledPath& path, double p, PVariationMode mode,
                   const PartitionSequence* seq) {
  check_p(p);
  if (path.dim() != 1) throw std::invalid_argument("p-variation needs a scalar path");
  if (mode == PVariationMode::along_levels) {
    if (seq == nullptr) throw std::invalid_argument("along_levels p-variation needs a partition");
    double best = 0.0;
    for (int n = 0; n < seq->level_count(); ++n) best = std::max(best, level_sum(path, p, seq->level(n)));
    return best;
  }

  const std::size_t n = path.size();
  if (n > kMaxDpPoints)
    throw std::invalid_argument("exact p-variation is limited to 4096 sample points");
  // best[j]: largest sum over chains 0 = i_0 < ... < i_k = j. Floating-point
  // addition is monotone, so the maximum over left-to-right sums is exact.
  std::vector<double> best(n, 0.0);
  for (std::size_t j = 1; j < n; ++j) {
    const double xj = path.value(j, 0);
    double b = -1.0;
    for (std::size_t i = 0; i < j; ++i)
      b = std::max(b, best[i] + std::pow(std::abs(xj - path.value(i, 0)), p));
    best[j] = b;
  }
  return best[n - 1];
}

VariationIndexEstimate variation_index_estimate(const SampledPath& path,
                                                const PartitionSequence& seq,
                                                std::span<const double> p_grid,
                                                int trailing_levels, double slope_threshold) {
  if (p_grid.empty()) throw std::invalid_argument("variation index needs a non-empty p grid");
  if (!std::is_sorted(p_grid.begin(), p_grid.end()))
    throw std::invalid_argument("variation index p grid must be increasing");
  for (double p : p_grid) check_p(p);
  if (path.dim() != 1) throw std::invalid_argument("variation index needs a scalar path");
  const int top = seq.top_level();
  const int first = std::max(0, top - std::max(2, trailing_levels) + 1);
  if (top - first < 1) throw std::invalid_argument("variation index needs at least two levels");

  VariationIndexEstimate out;
  out.p_grid.assign(p_grid.begin(), p_grid.end());
  out.slope_threshold = slope_threshold;
  for (double p : p_grid) {
    std::vector<double> xs;
    std::vector<double> ys;
    bool degenerate = false;
    for (int n = first; n <= top; ++n) {
      const double s = level_sum(path, p, seq.level(n));
      if (!(s > 0.0)) {
        degenerate = true;
        break;
      }
      xs.push_back(n);
      ys.push_back(std::log2(s));
    }
    double slope = 0.0;
    if (!degenerate) {
      const double k = static_cast<double>(xs.size());
      double mx = 0.0;
      double my = 0.0;
      for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i] / k;
        my += ys[i] / k;
      }
      double sxy = 0.0;
      double sxx = 0.0;
      for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
      }
      slope = sxy / sxx;
    }
    out.slopes.push_back(slope);
    if (slope < slope_threshold && std::isinf(out.estimate)) out.estimate = p;
  }
  return out;
}

}  // namespace pathwise
