#include "pathwise/serialization.hpp"

#include <ostream>
#include <stdexcept>

#include "pathwise/path_io.hpp"

namespace pathwise {

namespace {

Json matrix_json(const Matrix& m) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < m.size(); ++i) {
    Json row = Json::array();
    for (std::size_t j = 0; j < m.size(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json matrices_json(const std::vector<Matrix>& ms) {
  Json out = Json::array();
  for (const auto& m : ms) out.push_back(matrix_json(m));
  return out;
}

}  // namespace

Json partition_to_json(const PartitionSequence& seq) {
  Json j;
  const std::vector<double> extra(seq.extra_times().begin(), seq.extra_times().end());
  if (seq.kind() == PartitionSequence::Kind::dyadic) {
    j["type"] = "dyadic";
    j["T"] = seq.horizon();
    j["max_level"] = seq.dyadic_max_level();
  } else {
    j["type"] = "explicit";
    j["T"] = seq.horizon();
    j["levels"] = seq.levels();
    j["dense"] = seq.dense();
  }
  j["extra_times"] = extra;
  return j;
}

PartitionSequence partition_from_json(const Json& j) {
  const std::string type = j.value("type", "dyadic");
  const double horizon = j.value("T", 1.0);
  std::vector<double> extra;
  if (j.contains("extra_times")) extra = j.at("extra_times").get<std::vector<double>>();
  if (type == "dyadic") {
    if (!j.contains("max_level")) throw std::invalid_argument("dyadic partition needs max_level");
    return PartitionSequence::dyadic(horizon, j.at("max_level").get<int>()).refine_with(extra);
  }
  if (type == "explicit") {
    if (!j.contains("levels")) throw std::invalid_argument("explicit partition needs levels");
    auto levels = j.at("levels").get<std::vector<std::vector<double>>>();
    return PartitionSequence::from_levels(horizon, std::move(levels), j.value("dense", false))
        .refine_with(extra);
  }
  throw std::invalid_argument("unknown partition type '" + type + "'");
}

Json functional_spec_to_json(const FunctionalSpec& spec) {
  Json j;
  j["name"] = spec.name;
  j["dim"] = spec.dim;
  j["coordinate"] = spec.coordinate;
  if (!spec.cylinder.empty()) j["function"] = spec.cylinder;
  if (spec.name == "black_scholes") {
    j["sigma"] = spec.sigma;
    j["strike"] = spec.strike;
    j["option"] = spec.option == OptionType::call ? "call" : "put";
  }
  j["maturity"] = spec.maturity;
  return j;
}

FunctionalSpec functional_spec_from_json(const Json& j) {
  FunctionalSpec s;
  if (!j.contains("name")) throw std::invalid_argument("functional needs a name");
  s.name = j.at("name").get<std::string>();
  s.dim = j.value("dim", std::size_t{1});
  s.coordinate = j.value("coordinate", std::size_t{0});
  s.cylinder = j.value("function", std::string{});
  s.sigma = j.value("sigma", 0.0);
  s.strike = j.value("strike", 0.0);
  s.maturity = j.value("maturity", 1.0);
  const std::string option = j.value("option", std::string{"call"});
  if (option == "call") {
    s.option = OptionType::call;
  } else if (option == "put") {
    s.option = OptionType::put;
  } else {
    throw std::invalid_argument("option must be 'call' or 'put'");
  }
  return s;
}

Json to_json(const ConvergenceAssessment& a) {
  Json j;
  j["converged"] = a.converged;
  j["metric"] = a.metric;
  j["level_gaps"] = a.level_gaps;
  return j;
}

Json to_json(const QVReport& r) {
  Json j;
  j["levels"] = r.levels;
  j["probe_times"] = r.probe_times;
  j["limit"] = r.limit;
  j["continuous_part"] = r.continuous_part;
  j["jump_part"] = r.jump_part;
  j["convergence"] = to_json(r.convergence);
  j["refined"] = r.refined;
  return j;
}

Json to_json(const QVMatrixReport& r) {
  Json j;
  j["levels"] = r.levels;
  j["probe_times"] = r.probe_times;
  j["limit"] = matrices_json(r.limit);
  j["continuous_part"] = matrices_json(r.continuous_part);
  j["jump_part"] = matrices_json(r.jump_part);
  j["convergence"] = to_json(r.convergence);
  j["refined"] = r.refined;
  return j;
}

Json to_json(const IntegralReport& r) {
  Json j;
  switch (r.kind) {
    case IntegrandKind::functional_gradient: j["integrand"] = "functional_gradient"; break;
    case IntegrandKind::cylinder_gradient: j["integrand"] = "cylinder_gradient"; break;
    case IntegrandKind::generic_left_evaluated: j["integrand"] = "generic_left_evaluated"; break;
  }
  j["levels"] = r.levels;
  j["probe_times"] = r.probe_times;
  j["limit"] = r.limit;
  j["convergence"] = to_json(r.convergence);
  j["refined"] = r.refined;
  return j;
}

Json to_json(const ItoResidualReport& r) {
  Json j;
  j["level"] = r.level;
  j["lhs"] = r.lhs;
  j["follmer"] = r.follmer;
  j["time_integral"] = r.time_integral;
  j["second_order"] = r.second_order;
  j["jump_sum"] = r.jump_sum;
  j["residual"] = r.residual;
  j["qv_converged"] = r.qv_converged;
  j["qv_metric"] = r.qv_metric;
  return j;
}

Json to_json(const SelfFinancingReport& r) {
  Json j;
  j["scale"] = r.scale;
  j["tolerance"] = r.tolerance;
  j["value_gain_error"] = r.value_gain_error;
  j["portfolio_error"] = r.portfolio_error;
  j["jump_error"] = r.jump_error;
  j["rebalance_error"] = r.rebalance_error;
  j["gain_converged"] = r.gain_converged;
  j["gain_convergence_metric"] = r.gain_convergence_metric;
  j["identities_hold"] = r.identities_hold();
  j["passed"] = r.passed();
  return j;
}

Json to_json(const HedgeReport& r) {
  Json j;
  j["trading_level"] = r.trading_level;
  j["initial_value"] = r.initial_value;
  j["terminal_value"] = r.terminal_value;
  j["payoff"] = r.payoff;
  j["realized_pnl"] = r.realized_pnl;
  j["predicted_error"] = r.predicted_error;
  j["residual"] = r.residual;
  j["relative_residual"] = r.relative_residual;
  j["max_tracking_error"] = r.max_tracking_error;
  j["fpde_max_residual"] = r.fpde_max_residual;
  j["fpde_ok"] = r.fpde_ok;
  j["density_estimated"] = r.density_estimated;
  j["path_nonpositive"] = r.path_nonpositive;
  return j;
}

Json to_json(const PlausibilityReport& r) {
  Json j;
  Json rows = Json::array();
  for (const auto& l : r.levels) {
    Json row;
    row["level"] = l.level;
    row["identity_error"] = l.identity_error;
    row["strategy_identity_error"] = l.strategy_identity_error;
    row["k_n"] = l.k_n;
    row["min_slack"] = l.min_slack;
    row["cross_negative_part"] = l.cross_negative_part;
    row["k_partial_sum"] = l.k_partial_sum;
    row["cross_partial_sum"] = l.cross_partial_sum;
    rows.push_back(std::move(row));
  }
  j["levels"] = std::move(rows);
  j["probe_count"] = r.probe_times.size();
  j["tail_fraction"] = r.tail_fraction;
  j["bounded"] = r.bounded;
  return j;
}

Json to_json(const NorvaisaReport& r) {
  Json j;
  Json ivs = Json::array();
  for (const auto& iv : r.intervals) ivs.push_back({iv.start, iv.end});
  j["intervals"] = std::move(ivs);
  j["levels"] = r.levels;
  j["top_values"] = r.values.empty() ? std::vector<double>{} : r.values.back();
  j["cauchy_gaps"] = r.cauchy_gaps;
  j["additivity_gaps"] = r.additivity_gaps;
  Json jumps = Json::array();
  for (const auto& jc : r.jumps) {
    Json row;
    row["time"] = jc.time;
    row["delta_minus_h"] = jc.delta_minus_h;
    row["expected_minus"] = jc.expected_minus;
    row["delta_plus_h"] = jc.delta_plus_h;
    row["bound"] = jc.bound;
    row["holds"] = jc.holds;
    jumps.push_back(std::move(row));
  }
  j["jumps"] = std::move(jumps);
  j["converged"] = r.converged;
  return j;
}

Json to_json(const VovkReport& r) {
  Json j;
  j["levels"] = r.levels;
  j["sup_gaps"] = r.sup_gaps;
  j["uniform"] = r.uniform;
  j["boundary_identity_error"] = r.boundary_identity_error;
  j["boundary_samples"] = r.boundary_samples;
  return j;
}

Json to_json(const VariationIndexEstimate& r) {
  Json j;
  j["estimate"] = r.estimate;
  j["p_grid"] = r.p_grid;
  j["slopes"] = r.slopes;
  j["slope_threshold"] = r.slope_threshold;
  j["finite_resolution"] = r.finite_resolution;
  return j;
}

void write_level_table_csv(std::ostream& out, std::span<const int> levels,
                           std::span<const double> times,
                           const std::vector<std::vector<double>>& per_level) {
  if (per_level.size() != levels.size()) throw std::invalid_argument("level table size mismatch");
  out << "level,t,value\n";
  for (std::size_t k = 0; k < levels.size(); ++k)
    for (std::size_t p = 0; p < times.size(); ++p)
      out << levels[k] << ',' << format_double(times[p]) << ',' << format_double(per_level[k][p])
          << '\n';
}

void write_ledger_csv(std::ostream& out, const StrategyLedger& l) {
  out << "t,value,gain,bond";
  for (std::size_t c = 0; c < l.dim; ++c) out << ",phi" << c + 1;
  for (std::size_t c = 0; c < l.dim; ++c) out << ",x" << c + 1;
  out << '\n';
  for (std::size_t p = 0; p < l.times.size(); ++p) {
    out << format_double(l.times[p]) << ',' << format_double(l.value[p]) << ','
        << format_double(l.gain[p]) << ',' << format_double(l.bond[p]);
    for (double v : l.position[p]) out << ',' << format_double(v);
    for (double v : l.prices[p]) out << ',' << format_double(v);
    out << '\n';
  }
}

void write_hedge_curve_csv(std::ostream& out, const HedgeReport& r) {
  out << "t,portfolio,functional,difference\n";
  for (std::size_t j = 0; j < r.times.size(); ++j)
    out << format_double(r.times[j]) << ',' << format_double(r.portfolio_value[j]) << ','
        << format_double(r.functional_value[j]) << ','
        << format_double(r.portfolio_value[j] - r.functional_value[j]) << '\n';
}

void write_plausibility_csv(std::ostream& out, const PlausibilityReport& r) {
  out << "level,identity_error,strategy_identity_error,k_n,min_slack,cross_negative_part,"
         "k_partial_sum,cross_partial_sum\n";
  for (const auto& l : r.levels)
    out << l.level << ',' << format_double(l.identity_error) << ','
        << format_double(l.strategy_identity_error) << ',' << format_double(l.k_n) << ','
        << format_double(l.min_slack) << ',' << format_double(l.cross_negative_part) << ','
        << format_double(l.k_partial_sum) << ',' << format_double(l.cross_partial_sum) << '\n';
}

}  // namespace pathwise
