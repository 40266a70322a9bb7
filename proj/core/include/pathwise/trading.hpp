#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "pathwise/convergence.hpp"
#include "pathwise/functionals.hpp"
#include "pathwise/integration.hpp"
#include "pathwise/partitions.hpp"
#include "pathwise/paths.hpp"

namespace pathwise {

/// Holdings λ_i on (t_i, t_{i+1}], each decided from the path stopped at t_i.
/// φ(t) = Σ λ_i 1_{(t_i, t_{i+1}]}(t), so φ(0) = 0 and φ(0+) = λ_0.
struct SimpleStrategy {
  std::vector<double> trading_times;
  std::size_t dim = 1;
  std::function<Vector(std::size_t, const StoppedPath&)> rule;
  std::function<double(std::span<const double>)> initial_capital;
};

/// A strategy evaluated on one path.
struct RealizedStrategy {
  std::vector<double> trading_times;
  /// holdings[i] = λ_i, one per cell
  std::vector<Vector> holdings;
  double initial_capital = 0.0;
};

RealizedStrategy realize(const SimpleStrategy& s, const SampledPath& path);

/// φ(t): λ_k for t in (t_k, t_{k+1}], zero at t = 0.
Vector position(const RealizedStrategy& s, double t);
/// G(t) = Σ_{i=1..k} λ_{i-1}·(ω(t_i) - ω(t_{i-1})) + λ_k·(ω(t) - ω(t_k)),
/// k = k(t, n). Zero at t = 0.
double simple_gain(const RealizedStrategy& s, const SampledPath& path, double t);
/// The same sum with ω(t-) in the last increment, i.e. G(t-).
double simple_gain_left(const RealizedStrategy& s, const SampledPath& path, double t);
/// ψ(t) = V0 - λ_0·ω(0) - Σ_{i=1..k} ω(t_i)·(λ_i - λ_{i-1}); ψ(0) = V0.
double simple_bond_holdings(const RealizedStrategy& s, const SampledPath& path, double t);
/// G at many times with one pass of prefix sums.
std::vector<double> gain_curve(const RealizedStrategy& s, const SampledPath& path,
                               std::span<const double> times);

struct StrategyLedger {
  std::size_t dim = 1;
  double initial_capital = 0.0;
  std::vector<double> times;
  std::vector<double> gain;
  std::vector<double> bond;
  std::vector<double> value;
  std::vector<Vector> position;
  std::vector<Vector> prices;

  /// V(τ) - V(τ-) and φ(τ)·Δω(τ) at each jump time of the path.
  struct JumpRecord {
    double time = 0.0;
    double value_jump = 0.0;
    double predicted = 0.0;
  };
  std::vector<JumpRecord> jumps;

  /// ψ(t_i+) - ψ(t_i) and ω(t_i)·(φ(t_i+) - φ(t_i)) at each trading time.
  struct RebalanceRecord {
    double time = 0.0;
    double bond_change = 0.0;
    double stock_cost = 0.0;
  };
  std::vector<RebalanceRecord> rebalances;

  /// Gains G(t; φ^n) of the approximating simple strategies, one row per
  /// level, on `times`. Empty for a plain simple strategy.
  std::vector<int> levels;
  std::vector<std::vector<double>> level_gains;
};

/// Ledger of a simple strategy: G by the gain sum, ψ by the bond formula,
/// V = V0 + G, each computed on its own.
StrategyLedger ledger_for(const RealizedStrategy& s, const SampledPath& path,
                          std::span<const double> times);

struct VerticalFormOptions {
  PathMode mode = PathMode::cadlag;
  IntegrationOptions integration;
};

/// Limit self-financing strategy with stock position ∇F: builds the simple
/// strategies φ^n on each level, records their gains and reports the
/// top-level ledger. The initial capital is F(0, ω_0).
StrategyLedger gain_from_vertical_form(const Functional& f, const SampledPath& path,
                                       const PartitionSequence& seq,
                                       const VerticalFormOptions& options = {});

struct SelfFinancingReport {
  double scale = 1.0;
  double tolerance = 0.0;
  double value_gain_error = 0.0;
  double portfolio_error = 0.0;
  double jump_error = 0.0;
  double rebalance_error = 0.0;
  bool gain_converged = true;
  double gain_convergence_metric = 0.0;
  bool value_gain_ok = false;
  bool portfolio_ok = false;
  bool jumps_ok = false;
  bool rebalance_ok = false;

  bool identities_hold() const { return value_gain_ok && portfolio_ok && jumps_ok && rebalance_ok; }
  bool passed() const { return identities_hold() && gain_converged; }
};

/// Checks V = V0 + G and V = φ·ω + ψ at every ledger time, ΔV = φ·Δω at
/// jumps, the rebalance identity at trading times and, when level data is
/// present, convergence of the approximating gains. Errors are compared
/// with tol_rel times the ledger's scale.
SelfFinancingReport self_financing_check(const StrategyLedger& ledger,
                                         const ConvergenceOptions& convergence = {},
                                         double tol_rel = 1e-10);

struct HedgeOptions {
  /// Level whose points are the trading times; -1 means the top level.
  int trading_level = -1;
  /// Width in cells of the centered window for the estimated density.
  std::size_t density_window = 64;
  /// FPDE residual tolerance, relative to max(1, |F(0)|).
  double fpde_tol = 1e-6;
  std::size_t fpde_samples = 16;
  DerivativeOptions derivatives;
};

struct HedgeReport {
  int trading_level = 0;
  double initial_value = 0.0;
  double terminal_value = 0.0;
  double payoff = 0.0;
  /// V(T) - H(ω)
  double realized_pnl = 0.0;
  /// ½ ∫ tr((A - Ã) ∇²F) dt, left Riemann on the finest grid
  double predicted_error = 0.0;
  double residual = 0.0;
  /// residual / |predicted|, +inf when predicted is 0
  double relative_residual = 0.0;
  /// max_t |V(t) - F(t, ω_t)| over the finest grid
  double max_tracking_error = 0.0;
  double fpde_max_residual = 0.0;
  bool fpde_ok = false;
  bool density_estimated = false;
  /// Some price sample is <= 0. Reported only; the calculus does not need positive prices.
  bool path_nonpositive = false;
  std::vector<double> times;
  std::vector<double> portfolio_value;
  std::vector<double> functional_value;
};

/// Delta hedge of H with position ∇F, starting from F(0, ω_0). `realized`
/// is the path's own quadratic-variation density Ã; when absent it is
/// estimated from the path.
HedgeReport hedge(const Functional& f, const Payoff& payoff, const DensitySpec& model,
                  const SampledPath& path, const std::optional<DensitySpec>& realized,
                  const PartitionSequence& seq, const HedgeOptions& options = {});

/// Ã on each finest cell: the ratio of summed continuous quadratic-variation
/// increments to summed time steps over a centered window. Scalar paths.
std::vector<double> estimate_density(const SampledPath& path, std::size_t window);

struct PlausibilityOptions {
  int first_level = 0;
  /// Empty means every time of the path grid.
  std::vector<double> probe_times;
  /// Bounded verdict when the last half of the levels carries at most this
  /// fraction of Σ k_n.
  double tail_fraction_threshold = 0.2;
};

struct PlausibilityLevel {
  int level = 0;
  /// max_t |(A^n - A^{n-1}) - (-2 Σ_{j<k} cross terms)|
  double identity_error = 0.0;
  /// max_t |A^n - (ω(t)² - ω(0)² + G(t; φ^n))|
  double strategy_identity_error = 0.0;
  /// max_t (A^n - A^{n-1})⁻
  double k_n = 0.0;
  /// min_t (A^n - A^{n-1} + k_n), zero when k_n is the smallest valid choice
  double min_slack = 0.0;
  /// max_t of the negative part of the ordered-pair cross sum
  double cross_negative_part = 0.0;
  double k_partial_sum = 0.0;
  double cross_partial_sum = 0.0;
};

struct PlausibilityReport {
  std::vector<double> probe_times;
  std::vector<PlausibilityLevel> levels;
  double tail_fraction = 0.0;
  bool bounded = false;
};

/// Diagnostic for the strategy φ^n = -2 Σ ω(t_i) 1_{(t_i, t_{i+1}]} whose
/// gains reproduce the quadratic-variation sums. Scalar paths on a nested
/// sequence only.
PlausibilityReport plausibility_diagnostic(const SampledPath& path, const PartitionSequence& seq,
                                           const PlausibilityOptions& options = {});

}  // namespace pathwise
