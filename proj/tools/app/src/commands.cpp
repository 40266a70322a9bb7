#include "pathwise_app/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <future>
#include <thread>

#include "pathwise/integration.hpp"
#include "pathwise/path_io.hpp"
#include "pathwise/quadvar.hpp"
#include "pathwise/trading.hpp"

namespace pathwise::app {

namespace {

void write_file(const std::filesystem::path& dir, const char* name,
                const std::function<void(std::ostream&)>& body) {
  std::filesystem::create_directories(dir);
  const auto file = dir / name;
  std::ofstream out(file, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + file.string() + "'");
  body(out);
  if (!out) throw std::runtime_error("failed writing '" + file.string() + "'");
}

void write_json(const std::filesystem::path& dir, const char* name, const Json& j) {
  write_file(dir, name, [&](std::ostream& out) { out << j.dump(2) << '\n'; });
}

Functional make_functional(const ExperimentConfig& c) {
  try {
    return builtin(c.functional);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("functional: ") + e.what());
  }
}

DerivativeOptions derivative_options(const ExperimentConfig& c) {
  DerivativeOptions d;
  d.vertical_bump_rel = c.tolerances.fd_bump_rel;
  return d;
}

IntegrationOptions integration_options(const ExperimentConfig& c, std::vector<double> probes) {
  IntegrationOptions o;
  o.convergence.tol = c.tolerances.conv_tol;
  o.probe_times = std::move(probes);
  o.derivatives = derivative_options(c);
  return o;
}

Json header(const char* command, const ExperimentConfig& c, const PartitionSequence& seq) {
  Json j;
  j["command"] = command;
  j["config"] = config_to_json(c);
  j["partition_used"] = partition_to_json(seq);
  return j;
}

}  // namespace

double quantile(std::span<const double> values, double q) {
  if (values.empty()) throw std::invalid_argument("quantile of an empty set");
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  const double pos = std::clamp(q, 0.0, 1.0) * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

int cmd_qv(const ExperimentConfig& c, std::ostream& log) {
  const BuiltPath built = build_path(c, c.seed);
  const auto& path = built.path;
  QVOptions opts;
  opts.convergence.tol = c.tolerances.qv_tol;
  opts.probe_times = build_probes(c, path);

  Json j = header("qv", c, built.partition);
  bool converged = false;
  if (path.dim() == 1) {
    const QVReport r = qv_along(path, built.partition, opts);
    converged = r.converged();
    j["report"] = to_json(r);
    const std::vector<double> p_grid{1.0, 1.5, 2.0, 2.5, 3.0, 4.0};
    j["variation_index"] = to_json(variation_index_estimate(path, built.partition, p_grid));
    write_file(c.output_dir, "qv_levels.csv", [&](std::ostream& out) {
      write_level_table_csv(out, r.levels, r.probe_times, r.per_level);
    });
    log << "qv: A(T) = " << format_double(r.limit.back()) << " over levels " << r.levels.front()
        << ".." << r.levels.back() << ", metric " << format_double(r.convergence_metric()) << '\n';
  } else {
    const QVMatrixReport r = qv_matrix(path, built.partition, opts);
    converged = r.convergence.converged;
    j["report"] = to_json(r);
    write_file(c.output_dir, "qv_levels.csv", [&](std::ostream& out) {
      out << "level,t,i,j,value\n";
      for (std::size_t k = 0; k < r.levels.size(); ++k)
        for (std::size_t p = 0; p < r.probe_times.size(); ++p)
          for (std::size_t a = 0; a < path.dim(); ++a)
            for (std::size_t b = 0; b < path.dim(); ++b)
              out << r.levels[k] << ',' << format_double(r.probe_times[p]) << ',' << a + 1 << ','
                  << b + 1 << ',' << format_double(r.per_level[k][p](a, b)) << '\n';
    });
    log << "qv: " << path.dim() << "x" << path.dim() << " matrix over levels " << r.levels.front()
        << ".." << r.levels.back() << ", metric " << format_double(r.convergence.metric) << '\n';
  }
  j["converged"] = converged;
  write_json(c.output_dir, "qv_report.json", j);
  if (!converged) log << "qv: warning: the level sums have not converged\n";
  return converged ? ok : caveat;
}

int cmd_integrate(const ExperimentConfig& c, std::ostream& log) {
  const BuiltPath built = build_path(c, c.seed);
  const auto& path = built.path;
  const auto& seq = built.partition;
  const Functional f = make_functional(c);
  if (f.dim != path.dim())
    throw ConfigError("functional dimension " + std::to_string(f.dim) +
                      " differs from path dimension " + std::to_string(path.dim()));

  Json j = header("integrate", c, seq);
  if (c.integrate.p) {
    const double p = *c.integrate.p;
    const bool exact = path.size() <= 4096;
    const double v = p_variation(path, p, exact ? PVariationMode::exact_dp : PVariationMode::along_levels,
                                 &seq);
    j["p_variation"] = {{"p", p}, {"mode", exact ? "exact_dp" : "along_levels"}, {"value", v}};
  }

  const IntegralReport integral =
      follmer_integral_functional(f, path, seq, integration_options(c, build_probes(c, path)));
  write_file(c.output_dir, "integral_levels.csv", [&](std::ostream& out) {
    write_level_table_csv(out, integral.levels, integral.probe_times, integral.per_level);
  });
  j["integral"] = to_json(integral);

  VerticalFormOptions vf;
  vf.integration = integration_options(c, {});
  const StrategyLedger ledger = gain_from_vertical_form(f, path, seq, vf);
  ConvergenceOptions conv;
  conv.tol = c.tolerances.conv_tol;
  const SelfFinancingReport sf = self_financing_check(ledger, conv);
  write_file(c.output_dir, "gain.csv", [&](std::ostream& out) { write_ledger_csv(out, ledger); });
  j["self_financing"] = to_json(sf);

  std::vector<int> sweep = c.integrate.sweep_levels;
  if (sweep.empty())
    for (int n = std::max(1, seq.top_level() - 6); n <= seq.top_level(); ++n) sweep.push_back(n);
  std::vector<ItoResidualReport> rows;
  for (int n : sweep) {
    if (n < 0 || n > seq.top_level())
      throw ConfigError("sweep level " + std::to_string(n) + " is outside 0.." +
                        std::to_string(seq.top_level()));
    ItoOptions io;
    io.integration = integration_options(c, {});
    io.level = n;
    rows.push_back(ito_residual_functional(f, path, seq, io));
  }
  write_file(c.output_dir, "ito_sweep.csv", [&](std::ostream& out) {
    out << "level,lhs,follmer,time_integral,second_order,jump_sum,residual\n";
    for (const auto& r : rows)
      out << r.level << ',' << format_double(r.lhs) << ',' << format_double(r.follmer) << ','
          << format_double(r.time_integral) << ',' << format_double(r.second_order) << ','
          << format_double(r.jump_sum) << ',' << format_double(r.residual) << '\n';
  });
  Json sweep_json = Json::array();
  for (const auto& r : rows) sweep_json.push_back(to_json(r));
  j["ito_sweep"] = std::move(sweep_json);

  const bool good = integral.converged() && sf.passed();
  j["converged"] = good;
  write_json(c.output_dir, "integrate_report.json", j);
  log << "integrate: " << f.name << " integral at T = " << format_double(integral.limit.back())
      << ", metric " << format_double(integral.convergence.metric) << ", ledger identities "
      << (sf.identities_hold() ? "hold" : "FAIL") << '\n';
  if (!integral.converged() || !sf.gain_converged)
    log << "integrate: warning: the level sums have not converged\n";
  if (!sf.identities_hold()) log << "integrate: warning: the ledger identities fail\n";
  return good ? ok : caveat;
}

int cmd_hedge(const ExperimentConfig& c, std::ostream& log) {
  if (c.hedge.paths == 0) throw ConfigError("hedge needs at least one path");
  const Functional f = make_functional(c);
  if (c.hedge.model_sigma <= 0.0) throw ConfigError("hedge model_sigma must be positive");
  const DensitySpec model = DensitySpec::geometric(c.hedge.model_sigma, f.dim);
  const Payoff payoff = c.hedge.payoff == "average"
                            ? average_payoff(c.functional.coordinate)
                            : vanilla_payoff(c.functional.strike, c.functional.option,
                                             c.functional.coordinate);
  std::optional<DensitySpec> realized;
  if (!c.hedge.estimate_density) {
    if (c.hedge.realized_sigma) {
      realized = DensitySpec::geometric(*c.hedge.realized_sigma, f.dim);
    } else if (c.path.generator == "geometric_walk") {
      realized = DensitySpec::geometric(c.path.sigma, f.dim);
    }
  }
  HedgeOptions ho;
  ho.trading_level = c.level.value_or(-1);
  ho.density_window = c.hedge.density_window;
  ho.fpde_tol = c.tolerances.fpde_tol;
  ho.derivatives = derivative_options(c);

  // The level override picks the trading level, not the partition depth.
  ExperimentConfig full = c;
  full.level.reset();
  const PartitionSequence seq = build_partition(full);
  if (ho.trading_level > seq.top_level())
    throw ConfigError("trading level " + std::to_string(ho.trading_level) + " exceeds top level " +
                      std::to_string(seq.top_level()));

  const std::size_t n = c.hedge.paths;
  std::vector<HedgeReport> reports(n);
  std::vector<std::uint64_t> seeds(n);
  for (std::size_t i = 0; i < n; ++i) seeds[i] = c.seed + i;
  auto run = [&](std::size_t i) {
    const BuiltPath built = build_path(full, seeds[i]);
    if (built.path.dim() != f.dim) throw ConfigError("functional and path dimensions differ");
    reports[i] = hedge(f, payoff, model, built.path, realized, built.partition, ho);
    if (i != 0) {
      reports[i].times.clear();
      reports[i].portfolio_value.clear();
      reports[i].functional_value.clear();
    }
  };
  // Paths are independent; each result lands in its own slot, so the output
  // does not depend on scheduling.
  const std::size_t workers =
      std::min<std::size_t>(n, std::max(1u, std::thread::hardware_concurrency()));
  std::vector<std::future<void>> tasks;
  for (std::size_t w = 0; w < workers; ++w)
    tasks.push_back(std::async(std::launch::async, [&, w] {
      for (std::size_t i = w; i < n; i += workers) run(i);
    }));
  for (auto& t : tasks) t.get();

  std::vector<double> rel;
  std::vector<double> abs_res;
  double max_tracking = 0.0;
  std::size_t fpde_failures = 0;
  std::size_t nonpositive = 0;
  for (const auto& r : reports) {
    if (r.path_nonpositive) ++nonpositive;
    rel.push_back(r.relative_residual);
    abs_res.push_back(std::abs(r.residual));
    max_tracking = std::max(max_tracking, r.max_tracking_error);
    if (!r.fpde_ok) ++fpde_failures;
  }
  const double median_rel = quantile(rel, 0.5);
  const double p95_rel = quantile(rel, 0.95);

  write_file(c.output_dir, "hedge_paths.csv", [&](std::ostream& out) {
    out << "path,seed,initial_value,terminal_value,payoff,realized_pnl,predicted_error,residual,"
           "relative_residual,max_tracking_error,fpde_max_residual,fpde_ok\n";
    for (std::size_t i = 0; i < n; ++i) {
      const auto& r = reports[i];
      out << i << ',' << seeds[i] << ',' << format_double(r.initial_value) << ','
          << format_double(r.terminal_value) << ',' << format_double(r.payoff) << ','
          << format_double(r.realized_pnl) << ',' << format_double(r.predicted_error) << ','
          << format_double(r.residual) << ',' << format_double(r.relative_residual) << ','
          << format_double(r.max_tracking_error) << ',' << format_double(r.fpde_max_residual) << ','
          << (r.fpde_ok ? 1 : 0) << '\n';
    }
  });
  write_file(c.output_dir, "hedge_summary.csv", [&](std::ostream& out) {
    out << "statistic,value\n";
    out << "paths," << n << '\n';
    out << "trading_level," << reports[0].trading_level << '\n';
    out << "median_relative_residual," << format_double(median_rel) << '\n';
    out << "p95_relative_residual," << format_double(p95_rel) << '\n';
    out << "max_relative_residual," << format_double(quantile(rel, 1.0)) << '\n';
    out << "median_abs_residual," << format_double(quantile(abs_res, 0.5)) << '\n';
    out << "max_tracking_error," << format_double(max_tracking) << '\n';
    out << "fpde_failures," << fpde_failures << '\n';
  });
  write_file(c.output_dir, "hedge_curve.csv",
             [&](std::ostream& out) { write_hedge_curve_csv(out, reports[0]); });

  Json j = header("hedge", c, seq);
  j["summary"] = {{"paths", n},
                  {"trading_level", reports[0].trading_level},
                  {"median_relative_residual", median_rel},
                  {"p95_relative_residual", p95_rel},
                  {"max_tracking_error", max_tracking},
                  {"fpde_failures", fpde_failures},
                  {"nonpositive_paths", nonpositive},
                  {"density", realized ? realized->name : std::string("estimated")}};
  j["first_path"] = to_json(reports[0]);
  write_json(c.output_dir, "hedge_report.json", j);
  log << "hedge: " << n << " paths, median relative residual " << format_double(median_rel)
      << ", p95 " << format_double(p95_rel) << ", max tracking error "
      << format_double(max_tracking) << '\n';
  if (nonpositive > 0)
    log << "hedge: warning: " << nonpositive << " path(s) reach prices <= 0\n";
  if (fpde_failures > 0)
    log << "hedge: warning: the functional violates the pricing equation on " << fpde_failures
        << " path(s)\n";
  return fpde_failures == 0 ? ok : caveat;
}

int cmd_plausibility(const ExperimentConfig& c, std::ostream& log) {
  const BuiltPath built = build_path(c, c.seed);
  PlausibilityOptions po;
  po.tail_fraction_threshold = c.plausibility.tail_fraction_threshold;
  const PlausibilityReport r = plausibility_diagnostic(built.path, built.partition, po);
  write_file(c.output_dir, "plausibility_levels.csv",
             [&](std::ostream& out) { write_plausibility_csv(out, r); });
  Json j = header("plausibility", c, built.partition);
  j["report"] = to_json(r);
  write_json(c.output_dir, "plausibility_report.json", j);
  log << "plausibility: tail fraction " << format_double(r.tail_fraction) << ", "
      << (r.bounded ? "bounded" : "not bounded") << '\n';
  if (!r.bounded) log << "plausibility: warning: the k_n series does not settle\n";
  return r.bounded ? ok : caveat;
}

}  // namespace pathwise::app
