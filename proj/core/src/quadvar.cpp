#include "pathwise/quadvar.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace pathwise {

namespace {

void require_scalar(const SampledPath& path, const char* what) {
  if (path.dim() != 1)
    throw std::invalid_argument(std::string(what) + " needs a scalar path; use qv_matrix for d > 1");
}

std::vector<double> level_values(const SampledPath& path, std::span<const double> level) {
  std::vector<double> v(level.size());
  for (std::size_t i = 0; i < level.size(); ++i) v[i] = path.value_at(level[i])[0];
  return v;
}

/// C[k] = Σ_{i<k} (x(t_{i+1}) - x(t_i))²
std::vector<double> complete_cell_sums(const std::vector<double>& x) {
  std::vector<double> c(x.size(), 0.0);
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    const double dx = x[i + 1] - x[i];
    c[i + 1] = c[i] + dx * dx;
  }
  return c;
}

PartitionSequence covering(const SampledPath& path, const PartitionSequence& seq, bool& refined) {
  const auto jt = path.jump_times();
  refined = !seq.covers(jt);
  return refined ? seq.refine_with(jt) : seq;
}

std::vector<int> table_levels(const PartitionSequence& seq, int first_level) {
  const int first = std::max(0, first_level);
  if (seq.top_level() - first < 1)
    throw std::invalid_argument("quadratic variation needs at least two levels");
  std::vector<int> levels;
  for (int n = first; n <= seq.top_level(); ++n) levels.push_back(n);
  return levels;
}

std::vector<double> probes_for(const SampledPath& path, const QVOptions& options) {
  std::vector<double> probes =
      options.probe_times.empty() ? default_probe_times(path) : options.probe_times;
  for (double t : probes)
    if (!(t >= 0.0 && t <= path.horizon()))
      throw std::out_of_range("probe time outside [0, T]");
  return probes;
}

double jump_sum_at(const SampledPath& path, double t) {
  double out = 0.0;
  for (const auto& j : path.jumps())
    if (j.time <= t) out += j.size[0] * j.size[0];
  return out;
}

}  // namespace

std::vector<double> default_probe_times(const SampledPath& path) {
  std::vector<double> probes;
  const double horizon = path.horizon();
  for (int i = 0; i <= 64; ++i) probes.push_back(std::ldexp(i * horizon, -6));
  probes.back() = horizon;
  for (double t : path.jump_times()) probes.push_back(t);
  std::sort(probes.begin(), probes.end());
  probes.erase(std::unique(probes.begin(), probes.end()), probes.end());
  return probes;
}

std::vector<double> qv_curve(const SampledPath& path, std::span<const double> level) {
  require_scalar(path, "qv_curve");
  const auto x = level_values(path, level);
  const auto c = complete_cell_sums(x);
  std::vector<double> out(path.size());
  std::size_t k = 0;
  for (std::size_t j = 0; j < path.size(); ++j) {
    const double s = path.time(j);
    while (k + 1 < level.size() && level[k + 1] <= s) ++k;
    const double dx = path.value(j, 0) - x[k];
    out[j] = c[k] + dx * dx;
  }
  return out;
}

std::vector<double> qv_at(const SampledPath& path, std::span<const double> level,
                          std::span<const double> times) {
  require_scalar(path, "qv_at");
  const auto x = level_values(path, level);
  const auto c = complete_cell_sums(x);
  std::vector<double> out(times.size());
  for (std::size_t p = 0; p < times.size(); ++p) {
    const double t = times[p];
    const auto it = std::upper_bound(level.begin(), level.end(), t);
    const std::size_t k = static_cast<std::size_t>(it - level.begin()) - 1;
    const double dx = path.value_at(t)[0] - x[k];
    out[p] = c[k] + dx * dx;
  }
  return out;
}

QVReport qv_along(const SampledPath& path, const PartitionSequence& seq, const QVOptions& options) {
  require_scalar(path, "qv_along");
  if (seq.horizon() != path.horizon())
    throw std::invalid_argument("partition horizon differs from path horizon");
  QVReport r;
  const PartitionSequence used = covering(path, seq, r.refined);
  r.levels = table_levels(used, options.first_level);
  r.probe_times = probes_for(path, options);
  for (int n : r.levels) r.per_level.push_back(qv_at(path, used.level(n), r.probe_times));
  r.limit = r.per_level.back();
  for (std::size_t p = 0; p < r.probe_times.size(); ++p) {
    r.jump_part.push_back(jump_sum_at(path, r.probe_times[p]));
    r.continuous_part.push_back(r.limit[p] - r.jump_part[p]);
  }
  r.convergence = assess_convergence(r.per_level, options.convergence);
  return r;
}

QVMatrixReport qv_matrix(const SampledPath& path, const PartitionSequence& seq,
                         const QVOptions& options) {
  const std::size_t d = path.dim();
  if (d < 2) throw std::invalid_argument("qv_matrix needs a path of dimension >= 2");
  if (seq.horizon() != path.horizon())
    throw std::invalid_argument("partition horizon differs from path horizon");
  QVMatrixReport r;
  const PartitionSequence used = covering(path, seq, r.refined);
  r.levels = table_levels(used, options.first_level);
  r.probe_times = probes_for(path, options);
  const std::size_t np = r.probe_times.size();

  std::vector<std::vector<double>> coord_values(d);
  std::vector<std::vector<double>> flat;
  for (int n : r.levels) {
    const auto level = used.level(n);
    for (std::size_t i = 0; i < d; ++i) {
      coord_values[i].resize(level.size());
      for (std::size_t k = 0; k < level.size(); ++k) coord_values[i][k] = path.value_at(level[k])[i];
    }
    std::vector<Vector> at_probe;
    std::vector<std::size_t> cell;
    for (double t : r.probe_times) {
      at_probe.push_back(path.value_at(t));
      cell.push_back(static_cast<std::size_t>(std::upper_bound(level.begin(), level.end(), t) - level.begin()) - 1);
    }
    std::vector<Matrix> mats(np, Matrix(d));
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = i; j < d; ++j) {
        const auto& xi = coord_values[i];
        const auto& xj = coord_values[j];
        // complete-cell prefix sums of Δx^i Δx^j
        std::vector<double> c(level.size(), 0.0);
        for (std::size_t k = 0; k + 1 < level.size(); ++k)
          c[k + 1] = c[k] + (xi[k + 1] - xi[k]) * (xj[k + 1] - xj[k]);
        for (std::size_t p = 0; p < np; ++p) {
          const std::size_t k = cell[p];
          const double v = c[k] + (at_probe[p][i] - xi[k]) * (at_probe[p][j] - xj[k]);
          mats[p](i, j) = v;
          mats[p](j, i) = v;
        }
      }
    }
    std::vector<double> entries;
    entries.reserve(np * d * d);
    for (const auto& m : mats) entries.insert(entries.end(), m.data().begin(), m.data().end());
    flat.push_back(std::move(entries));
    r.per_level.push_back(std::move(mats));
  }
  r.limit = r.per_level.back();
  for (std::size_t p = 0; p < np; ++p) {
    Matrix jp(d);
    for (const auto& j : path.jumps())
      if (j.time <= r.probe_times[p]) jp += Matrix::outer(j.size, j.size);
    r.continuous_part.push_back(r.limit[p] - jp);
    r.jump_part.push_back(std::move(jp));
  }
  r.convergence = assess_convergence(flat, options.convergence);
  return r;
}

std::vector<double> continuous_qv_curve(const SampledPath& path) {
  require_scalar(path, "continuous_qv_curve");
  std::vector<double> out(path.size(), 0.0);
  for (std::size_t j = 1; j < path.size(); ++j) {
    const double dx = path.value(j, 0) - path.value(j - 1, 0);
    const double jump = path.has_jump(j) ? path.jump(j)[0] : 0.0;
    out[j] = out[j - 1] + dx * dx - jump * jump;
  }
  return out;
}

NorvaisaReport norvaisa_qv_check(const SampledPath& path, const PartitionSequence& seq,
                                 std::span<const Interval> intervals,
                                 const ConvergenceOptions& options) {
  require_scalar(path, "norvaisa_qv_check");
  if (!seq.nested()) throw std::invalid_argument("interval quadratic variation needs nested partitions");
  bool refined = false;
  const PartitionSequence used = covering(path, seq, refined);
  NorvaisaReport r;
  r.intervals.assign(intervals.begin(), intervals.end());
  for (const auto& iv : r.intervals)
    if (!(0.0 <= iv.start && iv.start <= iv.end && iv.end <= path.horizon()))
      throw std::invalid_argument("interval outside [0, T] or reversed");
  r.levels = table_levels(used, 0);

  auto x = [&](double t) { return path.value_at(t)[0]; };
  auto interval_sum = [&](std::span<const double> level, const Interval& iv) {
    double prev = x(iv.start);
    double s = 0.0;
    auto it = std::upper_bound(level.begin(), level.end(), iv.start);
    for (; it != level.end() && *it < iv.end; ++it) {
      const double v = x(*it);
      s += (v - prev) * (v - prev);
      prev = v;
    }
    const double v = x(iv.end);
    return s + (v - prev) * (v - prev);
  };

  for (int n : r.levels) {
    std::vector<double> row;
    for (const auto& iv : r.intervals) row.push_back(interval_sum(used.level(n), iv));
    r.values.push_back(std::move(row));
  }
  if (!r.intervals.empty()) {
    const auto assessment = assess_convergence(r.values, options);
    r.converged = assessment.converged;
    const auto& top = r.values.back();
    const auto& prev = r.values[r.values.size() - 2];
    for (std::size_t j = 0; j < r.intervals.size(); ++j) r.cauchy_gaps.push_back(std::abs(top[j] - prev[j]));
  }

  const auto top_level = used.level(used.top_level());
  auto h = [&](double t) { return interval_sum(top_level, Interval{0.0, t}); };
  for (const auto& iv : r.intervals)
    r.additivity_gaps.push_back(std::abs(interval_sum(top_level, iv) - (h(iv.end) - h(iv.start))));

  for (std::size_t idx : path.jump_indices()) {
    NorvaisaJumpCheck jc;
    jc.time = path.time(idx);
    const auto it = std::lower_bound(top_level.begin(), top_level.end(), jc.time);
    const double before = *(it - 1);
    const double dx = path.jump(idx)[0];
    jc.expected_minus = dx * dx;
    jc.delta_minus_h = h(jc.time) - h(before);
    if (it + 1 != top_level.end()) jc.delta_plus_h = h(*(it + 1)) - h(jc.time);
    const double osc = std::abs(path.left_limit(idx, 0) - x(before));
    jc.bound = 2.0 * std::abs(dx) * osc + osc * osc;
    const double scale = std::max(1.0, jc.expected_minus);
    jc.holds = std::abs(jc.delta_minus_h - jc.expected_minus) <= jc.bound + 1e-12 * scale;
    r.jumps.push_back(jc);
  }
  return r;
}

VovkReport vovk_uniform_check(const SampledPath& path, const PartitionSequence& seq,
                              const ConvergenceOptions& options, std::uint64_t sample_seed,
                              std::size_t samples) {
  require_scalar(path, "vovk_uniform_check");
  if (!seq.nested()) throw std::invalid_argument("uniform quadratic variation needs nested partitions");
  bool refined = false;
  const PartitionSequence used = covering(path, seq, refined);
  VovkReport r;
  r.levels = table_levels(used, 0);

  std::vector<std::vector<double>> curves;
  for (int n : r.levels) curves.push_back(qv_curve(path, used.level(n)));
  const auto& top = curves.back();
  double scale = 1.0;
  for (double v : top) scale = std::max(scale, std::abs(v));
  for (const auto& c : curves) {
    double gap = 0.0;
    for (std::size_t j = 0; j < c.size(); ++j) gap = std::max(gap, std::abs(c[j] - top[j]));
    r.sup_gaps.push_back(gap);
  }
  // Gaps of consecutive levels, measured the same way, decide uniformity.
  std::vector<double> consecutive;
  for (std::size_t k = 0; k + 1 < curves.size(); ++k) {
    double gap = 0.0;
    for (std::size_t j = 0; j < top.size(); ++j)
      gap = std::max(gap, std::abs(curves[k + 1][j] - curves[k][j]));
    consecutive.push_back(gap);
  }
  bool monotone = true;
  if (options.require_monotone && consecutive.size() >= 2)
    monotone = consecutive.back() <= consecutive[consecutive.size() - 2];
  r.uniform = consecutive.back() < options.tol * scale && monotone;

  std::vector<double> times = default_probe_times(path);
  std::mt19937_64 engine(sample_seed);
  for (std::size_t s = 0; s < samples; ++s)
    times.push_back(std::ldexp(static_cast<double>(engine() >> 11), -53) * path.horizon());

  for (int n : r.levels) {
    const auto level = used.level(n);
    const auto xl = level_values(path, level);
    const std::size_t m = level.size() - 1;
    for (double t : times) {
      const double xt = path.value_at(t)[0];
      double truncated = 0.0;
      double untruncated = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        const double right = level[i + 1] <= t ? xl[i + 1] : xt;
        const double left = level[i] <= t ? xl[i] : xt;
        truncated += (right - left) * (right - left);
        if (level[i] <= t) untruncated += (xl[i + 1] - xl[i]) * (xl[i + 1] - xl[i]);
      }
      const auto it =
          std::upper_bound(level.begin(), level.begin() + static_cast<std::ptrdiff_t>(m), t);
      const std::size_t kbar = static_cast<std::size_t>(it - level.begin()) - 1;
      const double first = xt - xl[kbar];
      const double second = xl[kbar + 1] - xl[kbar];
      const double err = std::abs((truncated - untruncated) - (first * first - second * second));
      r.boundary_identity_error = std::max(r.boundary_identity_error, err);
      ++r.boundary_samples;
    }
  }
  return r;
}

}  // namespace pathwise
