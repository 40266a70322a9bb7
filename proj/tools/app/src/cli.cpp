#include "pathwise_app/cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <optional>
#include <string>

#include "pathwise/errors.hpp"
#include "pathwise_app/commands.hpp"

namespace pathwise::app {

namespace {

struct Overrides {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<int> level;
};

void add_common(CLI::App* sub, Overrides& o) {
  sub->add_option("--config", o.config, "JSON experiment config")->required();
  sub->add_option("--seed", o.seed, "Override the config seed");
  sub->add_option("--out", o.out, "Output directory");
  sub->add_option("--level", o.level, "Override the level (trading level for hedge)");
}

std::filesystem::path output_dir(const Overrides& o, const ExperimentConfig& c) {
  if (!o.out.empty()) return o.out;
  if (!c.output_dir.empty()) return c.output_dir;
  if (const char* env = std::getenv(kOutDirEnv); env != nullptr && *env != '\0') return env;
  return "pathwise_out";
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Pathwise calculus experiments along partition sequences"};
  app.require_subcommand(1);
  Overrides o;
  using Command = int (*)(const ExperimentConfig&, std::ostream&);
  const std::pair<const char*, Command> commands[] = {
      {"qv", cmd_qv},
      {"integrate", cmd_integrate},
      {"hedge", cmd_hedge},
      {"plausibility", cmd_plausibility},
  };
  const char* descriptions[] = {
      "Quadratic variation along the partition levels",
      "Föllmer integral, strategy ledger and Itô residual sweep",
      "Delta hedge over a batch of seeded paths",
      "Diagnostic for the strategies whose gains are the quadratic-variation sums",
  };
  std::vector<CLI::App*> subs;
  for (std::size_t i = 0; i < std::size(commands); ++i) {
    subs.push_back(app.add_subcommand(commands[i].first, descriptions[i]));
    add_common(subs.back(), o);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? ok : usage;
  }

  try {
    ExperimentConfig c = load_config(o.config);
    if (o.seed) c.seed = *o.seed;
    if (o.level) c.level = *o.level;
    c.output_dir = output_dir(o, c);
    for (std::size_t i = 0; i < subs.size(); ++i)
      if (subs[i]->parsed()) return commands[i].second(c, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return usage;
  } catch (const CapabilityError& e) {
    err << "error: " << e.what() << '\n';
    return usage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return usage;
  }
  return usage;
}

}  // namespace pathwise::app
