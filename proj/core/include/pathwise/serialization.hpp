#pragma once

#include <iosfwd>

#include <nlohmann/json.hpp>

#include "pathwise/functionals.hpp"
#include "pathwise/integration.hpp"
#include "pathwise/partitions.hpp"
#include "pathwise/quadvar.hpp"
#include "pathwise/trading.hpp"

namespace pathwise {

using Json = nlohmann::ordered_json;

/// {"type": "dyadic", "T", "max_level", "extra_times"} or
/// {"type": "explicit", "T", "levels", "dense", "extra_times"}.
Json partition_to_json(const PartitionSequence& seq);
PartitionSequence partition_from_json(const Json& j);

/// {"name", "dim", "coordinate", "function", "sigma", "strike", "maturity", "option"}
Json functional_spec_to_json(const FunctionalSpec& spec);
FunctionalSpec functional_spec_from_json(const Json& j);

Json to_json(const ConvergenceAssessment& a);
Json to_json(const QVReport& r);
Json to_json(const QVMatrixReport& r);
Json to_json(const IntegralReport& r);
Json to_json(const ItoResidualReport& r);
Json to_json(const SelfFinancingReport& r);
/// Scalar summary only; the curves go to CSV.
Json to_json(const HedgeReport& r);
Json to_json(const PlausibilityReport& r);
Json to_json(const NorvaisaReport& r);
Json to_json(const VovkReport& r);
Json to_json(const VariationIndexEstimate& r);

/// level,t,value
void write_level_table_csv(std::ostream& out, std::span<const int> levels,
                           std::span<const double> times,
                           const std::vector<std::vector<double>>& per_level);
/// t,value,gain,bond,phi1..phid,x1..xd
void write_ledger_csv(std::ostream& out, const StrategyLedger& ledger);
/// t,portfolio,functional,difference
void write_hedge_curve_csv(std::ostream& out, const HedgeReport& r);
/// level,identity_error,strategy_identity_error,k_n,min_slack,cross_negative_part,k_partial_sum,cross_partial_sum
void write_plausibility_csv(std::ostream& out, const PlausibilityReport& r);

}  // namespace pathwise
