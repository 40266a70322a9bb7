#pragma once

#include <ostream>

namespace pathwise::app {

/// Environment variable naming the output directory when neither --out nor
/// the config sets one.
inline constexpr const char* kOutDirEnv = "PATHWISE_OUT_DIR";

/// Parses arguments, runs one subcommand and returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace pathwise::app
