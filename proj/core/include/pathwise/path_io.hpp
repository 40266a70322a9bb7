#pragma once

#include <iosfwd>
#include <string>

#include "pathwise/paths.hpp"

namespace pathwise {

struct PathReadOptions {
  /// Jump-column entries with |Δ| <= jump_threshold_rel * max(1, max|x|) are
  /// read as 0. The default is ten machine epsilons.
  double jump_threshold_rel = 10.0 * 2.220446049250313e-16;
};

/// CSV with header `t,x1,...,xd[,jump1,...,jumpd]`, one row per grid time.
SampledPath read_path_csv(std::istream& in, const PathReadOptions& options = {});
SampledPath read_path_csv_file(const std::string& filename, const PathReadOptions& options = {});

/// Writes the same format with shortest round-trip number formatting. Jump
/// columns are emitted only when the path has jumps.
void write_path_csv(std::ostream& out, const SampledPath& path);

/// Shortest decimal string that parses back to exactly `v`.
std::string format_double(double v);

}  // namespace pathwise
