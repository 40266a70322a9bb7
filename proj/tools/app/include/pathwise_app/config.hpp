#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pathwise/functionals.hpp"
#include "pathwise/generators.hpp"
#include "pathwise/partitions.hpp"
#include "pathwise/paths.hpp"
#include "pathwise/serialization.hpp"

namespace pathwise::app {

/// Bad or inconsistent configuration; maps to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PathConfig {
  /// "smooth", "scaled_walk", "geometric_walk", "oscillating" or "file"
  std::string generator = "scaled_walk";
  std::string function = "sin";
  double sigma = 1.0;
  double x0 = 0.0;
  std::size_t dim = 1;
  /// Amplitude of the oscillating path.
  double amplitude = 1.0;
  std::vector<Jump> jumps;
  std::filesystem::path file;
};

struct Tolerances {
  double qv_tol = 1e-3;
  double conv_tol = 1e-3;
  double fd_bump_rel = 1e-4;
  double fpde_tol = 1e-6;
};

struct ProbeConfig {
  /// i*T/count for i = 0..count, plus jump times; ignored when `times` is set.
  std::size_t count = 64;
  std::vector<double> times;
};

struct IntegrateConfig {
  /// Levels of the Itô residual sweep; empty means the last seven levels.
  std::vector<int> sweep_levels;
  /// When set, the path's p-variation is reported.
  std::optional<double> p;
};

struct HedgeConfig {
  std::size_t paths = 64;
  double model_sigma = 0.2;
  /// Density of the realized quadratic variation, σ̃² x². When absent and
  /// the paths are geometric walks, their own σ is used; otherwise Ã is
  /// estimated from each path.
  std::optional<double> realized_sigma;
  bool estimate_density = false;
  std::size_t density_window = 64;
  /// "vanilla" or "average"
  std::string payoff = "vanilla";
};

struct PlausibilityConfig {
  double tail_fraction_threshold = 0.2;
};

struct ExperimentConfig {
  std::uint64_t seed = 1;
  Json partition = {{"type", "dyadic"}, {"T", 1.0}, {"max_level", 12}};
  PathConfig path;
  FunctionalSpec functional = [] {
    FunctionalSpec s;
    s.name = "identity";
    return s;
  }();
  Tolerances tolerances;
  ProbeConfig probe;
  /// Top level for qv, integrate and plausibility; trading level for hedge.
  std::optional<int> level;
  /// Empty defers to the command line, then the environment.
  std::filesystem::path output_dir;
  IntegrateConfig integrate;
  HedgeConfig hedge;
  PlausibilityConfig plausibility;
};

/// Reads a JSON config. Relative path files resolve against the config's
/// directory. Missing keys keep their defaults.
ExperimentConfig load_config(const std::filesystem::path& file);
ExperimentConfig config_from_json(const Json& j, const std::filesystem::path& base_dir = {});
/// Every field, defaults included.
Json config_to_json(const ExperimentConfig& c);

/// The configured partition, truncated to `level` when set.
PartitionSequence build_partition(const ExperimentConfig& c);
/// The configured path on the partition, which is refined with the path's
/// jump times when needed. `seed` replaces c.seed.
struct BuiltPath {
  PartitionSequence partition;
  SampledPath path;
};
BuiltPath build_path(const ExperimentConfig& c, std::uint64_t seed);
std::vector<double> build_probes(const ExperimentConfig& c, const SampledPath& path);

}  // namespace pathwise::app
