#pragma once

#include <ostream>
#include <span>

#include "pathwise_app/config.hpp"

namespace pathwise::app {

enum ExitCode : int { ok = 0, caveat = 1, usage = 2 };

/// Each command writes its files into c.output_dir and returns ok, or caveat
/// when a convergence or sanity flag is raised. Configuration problems throw
/// ConfigError; library precondition failures propagate.
int cmd_qv(const ExperimentConfig& c, std::ostream& log);
int cmd_integrate(const ExperimentConfig& c, std::ostream& log);
int cmd_hedge(const ExperimentConfig& c, std::ostream& log);
int cmd_plausibility(const ExperimentConfig& c, std::ostream& log);

/// Linear-interpolation quantile of unsorted values, q in [0, 1].
double quantile(std::span<const double> values, double q);

}  // namespace pathwise::app
