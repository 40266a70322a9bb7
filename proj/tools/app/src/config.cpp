#include "pathwise_app/config.hpp"

#include <algorithm>
#include <fstream>
#include <memory>

#include "pathwise/path_io.hpp"

namespace pathwise::app {

namespace {

template <class T>
void read(const Json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

template <class T>
void read(const Json& j, const char* key, std::optional<T>& out) {
  if (!j.contains(key) || j.at(key).is_null()) return;
  T v{};
  read(j, key, v);
  out = v;
}

const Json& section(const Json& j, const char* key) {
  static const Json empty = Json::object();
  if (!j.contains(key)) return empty;
  if (!j.at(key).is_object()) throw ConfigError(std::string("config key '") + key + "' must be an object");
  return j.at(key);
}

PathConfig path_from_json(const Json& j, const std::filesystem::path& base_dir) {
  PathConfig p;
  read(j, "generator", p.generator);
  read(j, "function", p.function);
  read(j, "sigma", p.sigma);
  read(j, "x0", p.x0);
  // a geometric walk must start above zero
  if (p.generator == "geometric_walk" && !j.contains("x0")) p.x0 = 1.0;
  read(j, "dim", p.dim);
  read(j, "amplitude", p.amplitude);
  if (j.contains("jumps")) {
    for (const auto& jj : j.at("jumps")) {
      Jump jump;
      read(jj, "time", jump.time);
      read(jj, "size", jump.size);
      p.jumps.push_back(std::move(jump));
    }
  }
  std::string file;
  read(j, "file", file);
  if (!file.empty()) {
    p.generator = "file";
    p.file = std::filesystem::path(file);
    if (p.file.is_relative() && !base_dir.empty()) p.file = base_dir / p.file;
  }
  static const char* known[] = {"smooth", "scaled_walk", "geometric_walk", "oscillating", "file"};
  if (std::find(std::begin(known), std::end(known), p.generator) == std::end(known))
    throw ConfigError("unknown path generator '" + p.generator + "'");
  if (p.generator == "file" && p.file.empty()) throw ConfigError("path generator 'file' needs a file");
  return p;
}

}  // namespace

ExperimentConfig config_from_json(const Json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  ExperimentConfig c;
  read(j, "seed", c.seed);
  if (j.contains("partition")) c.partition = j.at("partition");
  c.path = path_from_json(section(j, "path"), base_dir);
  if (j.contains("functional")) {
    try {
      c.functional = functional_spec_from_json(j.at("functional"));
    } catch (const std::exception& e) {
      throw ConfigError(std::string("functional: ") + e.what());
    }
  }
  const Json& tol = section(j, "tolerances");
  read(tol, "qv_tol", c.tolerances.qv_tol);
  read(tol, "conv_tol", c.tolerances.conv_tol);
  read(tol, "fd_bump_rel", c.tolerances.fd_bump_rel);
  read(tol, "fpde_tol", c.tolerances.fpde_tol);
  const Json& probe = section(j, "probe");
  read(probe, "count", c.probe.count);
  read(probe, "times", c.probe.times);
  read(j, "level", c.level);
  std::string out;
  read(j, "output_dir", out);
  if (!out.empty()) c.output_dir = out;
  const Json& integ = section(j, "integrate");
  read(integ, "sweep_levels", c.integrate.sweep_levels);
  read(integ, "p", c.integrate.p);
  const Json& h = section(j, "hedge");
  read(h, "paths", c.hedge.paths);
  read(h, "model_sigma", c.hedge.model_sigma);
  read(h, "realized_sigma", c.hedge.realized_sigma);
  read(h, "estimate_density", c.hedge.estimate_density);
  read(h, "density_window", c.hedge.density_window);
  read(h, "payoff", c.hedge.payoff);
  if (c.hedge.payoff != "vanilla" && c.hedge.payoff != "average")
    throw ConfigError("hedge payoff must be 'vanilla' or 'average'");
  const Json& pl = section(j, "plausibility");
  read(pl, "tail_fraction_threshold", c.plausibility.tail_fraction_threshold);
  if (c.probe.count == 0 && c.probe.times.empty()) throw ConfigError("probe count must be positive");
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open config file '" + file.string() + "'");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError("config file '" + file.string() + "' is not valid JSON: " + e.what());
  }
  return config_from_json(j, file.parent_path());
}

Json config_to_json(const ExperimentConfig& c) {
  Json j;
  j["seed"] = c.seed;
  j["partition"] = c.partition;
  Json p;
  p["generator"] = c.path.generator;
  if (c.path.generator == "file") {
    p["file"] = c.path.file.generic_string();
  } else {
    p["function"] = c.path.function;
    p["sigma"] = c.path.sigma;
    p["x0"] = c.path.x0;
    p["dim"] = c.path.dim;
    p["amplitude"] = c.path.amplitude;
    Json jumps = Json::array();
    for (const auto& jump : c.path.jumps) jumps.push_back({{"time", jump.time}, {"size", jump.size}});
    p["jumps"] = std::move(jumps);
  }
  j["path"] = std::move(p);
  j["functional"] = functional_spec_to_json(c.functional);
  j["tolerances"] = {{"qv_tol", c.tolerances.qv_tol},
                     {"conv_tol", c.tolerances.conv_tol},
                     {"fd_bump_rel", c.tolerances.fd_bump_rel},
                     {"fpde_tol", c.tolerances.fpde_tol}};
  j["probe"] = {{"count", c.probe.count}, {"times", c.probe.times}};
  j["level"] = c.level ? Json(*c.level) : Json(nullptr);
  j["output_dir"] = c.output_dir.generic_string();
  j["integrate"] = {{"sweep_levels", c.integrate.sweep_levels},
                    {"p", c.integrate.p ? Json(*c.integrate.p) : Json(nullptr)}};
  j["hedge"] = {{"paths", c.hedge.paths},
                {"model_sigma", c.hedge.model_sigma},
                {"realized_sigma", c.hedge.realized_sigma ? Json(*c.hedge.realized_sigma) : Json(nullptr)},
                {"estimate_density", c.hedge.estimate_density},
                {"density_window", c.hedge.density_window},
                {"payoff", c.hedge.payoff}};
  j["plausibility"] = {{"tail_fraction_threshold", c.plausibility.tail_fraction_threshold}};
  return j;
}

PartitionSequence build_partition(const ExperimentConfig& c) {
  PartitionSequence seq = [&] {
    try {
      return partition_from_json(c.partition);
    } catch (const Json::exception& e) {
      throw ConfigError(std::string("partition: ") + e.what());
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("partition: ") + e.what());
    }
  }();
  if (!c.level) return seq;
  const int level = *c.level;
  if (level < 1 || level > seq.top_level())
    throw ConfigError("level " + std::to_string(level) + " is outside 1.." +
                      std::to_string(seq.top_level()));
  if (seq.kind() == PartitionSequence::Kind::dyadic)
    return PartitionSequence::dyadic(seq.horizon(), level).refine_with(seq.extra_times());
  std::vector<std::vector<double>> levels(seq.levels().begin(), seq.levels().begin() + level + 1);
  return PartitionSequence::from_levels(seq.horizon(), std::move(levels), seq.dense());
}

BuiltPath build_path(const ExperimentConfig& c, std::uint64_t seed) {
  PartitionSequence seq = build_partition(c);
  const PathConfig& pc = c.path;
  if (pc.generator == "file") {
    SampledPath path = read_path_csv_file(pc.file.string());
    const auto jt = path.jump_times();
    if (!seq.covers(jt)) seq = seq.refine_with(jt);
    return {std::move(seq), std::move(path)};
  }
  if (pc.generator == "oscillating") {
    if (seq.kind() != PartitionSequence::Kind::dyadic || !seq.extra_times().empty())
      throw ConfigError("the oscillating path needs a plain dyadic partition");
    return {seq, oscillating_path(seq.horizon(), seq.top_level(), pc.amplitude)};
  }
  GeneratorSpec spec;
  if (pc.generator == "smooth") {
    spec.kind = named_smooth(pc.function);
  } else if (pc.generator == "scaled_walk") {
    spec.kind = ScaledWalkSpec{pc.sigma, pc.x0, pc.dim};
  } else {
    spec.kind = GeometricWalkSpec{pc.sigma, pc.x0, pc.dim};
  }
  if (!pc.jumps.empty()) {
    auto base = std::make_shared<const GeneratorSpec>(std::move(spec));
    spec = GeneratorSpec{WithJumpsSpec{std::move(base), pc.jumps}};
  }
  const auto jt = jump_times(spec);
  if (!seq.covers(jt)) seq = seq.refine_with(jt);
  SampledPath path = generate(spec, seed, seq);
  return {std::move(seq), std::move(path)};
}

std::vector<double> build_probes(const ExperimentConfig& c, const SampledPath& path) {
  std::vector<double> times = c.probe.times;
  const double horizon = path.horizon();
  if (times.empty()) {
    for (std::size_t i = 0; i <= c.probe.count; ++i)
      times.push_back(horizon * static_cast<double>(i) / static_cast<double>(c.probe.count));
  }
  for (double t : path.jump_times()) times.push_back(t);
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  for (double t : times)
    if (!(t >= 0.0 && t <= horizon)) throw ConfigError("probe time outside [0, T]");
  return times;
}

}  // namespace pathwise::app
