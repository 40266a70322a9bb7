#include "pathwise/generators.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>
#include <type_traits>

namespace pathwise {

namespace {

std::mt19937_64 coordinate_engine(std::uint64_t seed, std::size_t coordinate) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(coordinate)};
  return std::mt19937_64(seq);
}

double draw_sign(std::mt19937_64& engine) { return (engine() >> 63) != 0 ? 1.0 : -1.0; }

SampledPath generate_smooth(const SmoothSpec& spec, std::span<const double> grid) {
  if (!spec.f) throw std::invalid_argument("smooth generator without a function");
  const Vector first = spec.f(grid[0]);
  const std::size_t d = first.size();
  if (d == 0) throw std::invalid_argument("smooth generator returned an empty vector");
  std::vector<double> vals;
  vals.reserve(grid.size() * d);
  for (double t : grid) {
    const Vector v = spec.f(t);
    if (v.size() != d) throw std::invalid_argument("smooth generator changed dimension");
    vals.insert(vals.end(), v.begin(), v.end());
  }
  return SampledPath(std::vector<double>(grid.begin(), grid.end()), d, std::move(vals));
}

SampledPath generate_walk(const ScaledWalkSpec& spec, std::uint64_t seed,
                          std::span<const double> grid) {
  if (!(spec.sigma > 0.0)) throw std::invalid_argument("random walk sigma must be positive");
  if (spec.dim == 0) throw std::invalid_argument("random walk dimension must be positive");
  const std::size_t d = spec.dim;
  std::vector<double> vals(grid.size() * d);
  for (std::size_t c = 0; c < d; ++c) {
    auto engine = coordinate_engine(seed, c);
    double x = spec.x0;
    vals[c] = x;
    for (std::size_t i = 1; i < grid.size(); ++i) {
      x += draw_sign(engine) * spec.sigma * std::sqrt(grid[i] - grid[i - 1]);
      vals[i * d + c] = x;
    }
  }
  return SampledPath(std::vector<double>(grid.begin(), grid.end()), d, std::move(vals));
}

SampledPath generate_geometric(const GeometricWalkSpec& spec, std::uint64_t seed,
                               std::span<const double> grid) {
  if (!(spec.sigma > 0.0)) throw std::invalid_argument("geometric walk sigma must be positive");
  if (!(spec.x0 > 0.0)) throw std::invalid_argument("geometric walk x0 must be positive");
  if (spec.dim == 0) throw std::invalid_argument("geometric walk dimension must be positive");
  double max_cell = 0.0;
  for (std::size_t i = 1; i < grid.size(); ++i) max_cell = std::max(max_cell, grid[i] - grid[i - 1]);
  if (!(spec.sigma * std::sqrt(max_cell) < 1.0))
    throw std::invalid_argument("geometric walk step sigma*sqrt(h) must be below 1");
  const std::size_t d = spec.dim;
  std::vector<double> vals(grid.size() * d);
  for (std::size_t c = 0; c < d; ++c) {
    auto engine = coordinate_engine(seed, c);
    double x = spec.x0;
    vals[c] = x;
    for (std::size_t i = 1; i < grid.size(); ++i) {
      x *= 1.0 + draw_sign(engine) * spec.sigma * std::sqrt(grid[i] - grid[i - 1]);
      vals[i * d + c] = x;
    }
  }
  return SampledPath(std::vector<double>(grid.begin(), grid.end()), d, std::move(vals));
}

}  // namespace

SmoothSpec named_smooth(const std::string& name) {
  if (name == "linear") return {name, [](double t) { return Vector{t}; }};
  if (name == "square") return {name, [](double t) { return Vector{t * t}; }};
  if (name == "sin") return {name, [](double t) { return Vector{std::sin(t)}; }};
  if (name == "cos") return {name, [](double t) { return Vector{std::cos(t)}; }};
  if (name == "exp") return {name, [](double t) { return Vector{std::exp(t)}; }};
  if (name == "constant") return {name, [](double) { return Vector{1.0}; }};
  throw std::invalid_argument("unknown smooth path '" + name + "'");
}

std::vector<double> jump_times(const GeneratorSpec& spec) {
  if (const auto* wj = std::get_if<WithJumpsSpec>(&spec.kind)) {
    std::vector<double> out = wj->base ? jump_times(*wj->base) : std::vector<double>{};
    for (const auto& j : wj->jumps) out.push_back(j.time);
    std::sort(out.begin(), out.end());
    return out;
  }
  return {};
}

SampledPath generate(const GeneratorSpec& spec, std::uint64_t seed, const PartitionSequence& seq) {
  const auto grid = seq.finest();
  return std::visit(
      [&](const auto& kind) -> SampledPath {
        using K = std::decay_t<decltype(kind)>;
        if constexpr (std::is_same_v<K, SmoothSpec>) {
          return generate_smooth(kind, grid);
        } else if constexpr (std::is_same_v<K, ScaledWalkSpec>) {
          return generate_walk(kind, seed, grid);
        } else if constexpr (std::is_same_v<K, GeometricWalkSpec>) {
          return generate_geometric(kind, seed, grid);
        } else {
          if (!kind.base) throw std::invalid_argument("jump generator without a base path");
          const SampledPath base = generate(*kind.base, seed, seq);
          const std::size_t d = base.dim();
          std::vector<double> vals(base.size() * d);
          std::vector<Jump> jumps = base.jumps();
          Vector offset(d, 0.0);
          std::size_t next = 0;
          std::vector<Jump> added = kind.jumps;
          std::sort(added.begin(), added.end(),
                    [](const Jump& a, const Jump& b) { return a.time < b.time; });
          for (std::size_t i = 0; i < base.size(); ++i) {
            while (next < added.size() && added[next].time <= base.time(i)) {
              const auto& j = added[next];
              if (j.size.size() != d) throw std::invalid_argument("jump size has wrong dimension");
              if (j.time != base.time(i))
                throw std::invalid_argument("jump time " + std::to_string(j.time) +
                                            " is not on the finest grid");
              for (std::size_t c = 0; c < d; ++c) offset[c] += j.size[c];
              ++next;
            }
            for (std::size_t c = 0; c < d; ++c) vals[i * d + c] = base.value(i, c) + offset[c];
          }
          if (next < added.size())
            throw std::invalid_argument("jump time beyond the horizon");
          for (const auto& j : added) {
            auto it = std::find_if(jumps.begin(), jumps.end(),
                                   [&](const Jump& e) { return e.time == j.time; });
            if (it == jumps.end()) {
              jumps.push_back(j);
            } else {
              for (std::size_t c = 0; c < d; ++c) it->size[c] += j.size[c];
            }
          }
          return SampledPath(std::vector<double>(grid.begin(), grid.end()), d, std::move(vals),
                             std::move(jumps));
        }
      },
      spec.kind);
}

SampledPath oscillating_path(double horizon, int level, double c) {
  if (!(horizon > 0.0)) throw std::invalid_argument("oscillating path: horizon must be positive");
  if (level < 1) throw std::invalid_argument("oscillating path: level must be >= 1");
  const std::size_t n = std::size_t{1} << level;
  std::vector<double> x(n + 1, 0.0);
  for (int m = 1; m <= level; ++m) {
    const std::size_t stride = n >> m;
    const double h = std::ldexp(horizon, -m);
    const double disp = (m % 2 == 0) ? c * std::sqrt(h) : 0.0;
    double sign = 1.0;
    for (std::size_t i = stride; i < n; i += 2 * stride) {
      x[i] = 0.5 * (x[i - stride] + x[i + stride]) + sign * disp;
      sign = -sign;
    }
  }
  std::vector<double> grid(n + 1);
  for (std::size_t i = 0; i <= n; ++i) grid[i] = std::ldexp(static_cast<double>(i) * horizon, -level);
  grid.back() = horizon;
  return SampledPath(std::move(grid), 1, std::move(x));
}

}  // namespace pathwise
