#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "pathwise/paths.hpp"

namespace pathwise {

/// Deterministic t -> x(t).
struct SmoothSpec {
  std::string name;
  std::function<Vector(double)> f;
};

/// Increments ±σ√h with equal probability, h the local finest cell length.
/// The squared increments sum to σ² per unit time exactly.
struct ScaledWalkSpec {
  double sigma = 1.0;
  double x0 = 0.0;
  std::size_t dim = 1;
};

/// Multiplicative steps x -> x(1 ± σ√h); the quadratic variation density is
/// close to σ² x(t)².
struct GeometricWalkSpec {
  double sigma = 0.2;
  double x0 = 1.0;
  std::size_t dim = 1;
};

struct GeneratorSpec;

/// Adds the listed jumps to a base path: x(t) = base(t) + Σ_{s <= t} Δ(s).
struct WithJumpsSpec {
  std::shared_ptr<const GeneratorSpec> base;
  std::vector<Jump> jumps;
};

struct GeneratorSpec {
  std::variant<SmoothSpec, ScaledWalkSpec, GeometricWalkSpec, WithJumpsSpec> kind;
};

/// Named smooth scalar paths: "linear" (t), "square" (t²), "sin", "cos",
/// "exp", "constant" (1). Unknown names throw std::invalid_argument.
SmoothSpec named_smooth(const std::string& name);

/// Jump times the generator will place, so callers can refine their partition.
std::vector<double> jump_times(const GeneratorSpec& spec);

/// Samples the generator on seq.finest(). Random kinds draw one std::mt19937_64
/// stream per coordinate, seeded with seed_seq{low32(seed), high32(seed), c},
/// and take the sign from the top bit of each draw. Every step is specified
/// by the standard, so output is identical across platforms.
SampledPath generate(const GeneratorSpec& spec, std::uint64_t seed, const PartitionSequence& seq);

/// Scalar path on the dyadic grid of `level` whose level-wise increments are
/// built by midpoint displacement: the displacement is zero on odd levels and
/// ±c·√h (signs alternating in space) on even levels. Refining by one level
/// then alternately preserves and inflates the discrete quadratic variation,
/// so it has no limit along the dyadic sequence.
SampledPath oscillating_path(double horizon, int level, double c = 1.0);

}  // namespace pathwise
