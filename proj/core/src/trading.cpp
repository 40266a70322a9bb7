#include "pathwise/trading.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "pathwise/errors.hpp"
#include "pathwise/quadvar.hpp"

namespace pathwise {

namespace {

void validate_times(std::span<const double> times, double horizon) {
  if (times.size() < 2) throw std::invalid_argument("a strategy needs at least two trading times");
  if (times.front() != 0.0 || times.back() != horizon)
    throw std::invalid_argument("trading times must start at 0 and end at the path horizon");
  if (std::adjacent_find(times.begin(), times.end(), std::greater_equal<>()) != times.end())
    throw std::invalid_argument("trading times must be strictly increasing");
}

/// k(t, n) on the trading grid, with k = 0 at t = 0.
std::size_t cell_of(const RealizedStrategy& s, double t) {
  const auto& tt = s.trading_times;
  if (!(t >= 0.0 && t <= tt.back())) throw std::out_of_range("time outside [0, T]");
  if (t == 0.0) return 0;
  return static_cast<std::size_t>(std::lower_bound(tt.begin(), tt.end(), t) - tt.begin()) - 1;
}

std::vector<double> gain_prefix(const RealizedStrategy& s, const std::vector<Vector>& x) {
  std::vector<double> prefix(s.holdings.size() + 1, 0.0);
  for (std::size_t i = 1; i <= s.holdings.size(); ++i)
    prefix[i] = prefix[i - 1] + dot(s.holdings[i - 1], subtract(x[i], x[i - 1]));
  return prefix;
}

std::vector<Vector> prices_at(const SampledPath& path, std::span<const double> times) {
  std::vector<Vector> x;
  x.reserve(times.size());
  for (double t : times) x.push_back(path.value_at(t));
  return x;
}

double gain_impl(const RealizedStrategy& s, const SampledPath& path, double t, bool left) {
  if (t == 0.0) return 0.0;
  const std::size_t k = cell_of(s, t);
  const auto x = prices_at(path, s.trading_times);
  double g = 0.0;
  for (std::size_t i = 1; i <= k; ++i) g += dot(s.holdings[i - 1], subtract(x[i], x[i - 1]));
  const Vector end = left ? path.left_limit_at(t) : path.value_at(t);
  return g + dot(s.holdings[k], subtract(end, x[k]));
}

/// ψ with the first k rebalances applied.
double bond_after(const RealizedStrategy& s, const std::vector<Vector>& x, std::size_t k) {
  double psi = s.initial_capital - dot(s.holdings[0], x[0]);
  for (std::size_t i = 1; i <= k; ++i)
    psi -= dot(x[i], subtract(s.holdings[i], s.holdings[i - 1]));
  return psi;
}

}  // namespace

RealizedStrategy realize(const SimpleStrategy& s, const SampledPath& path) {
  validate_times(s.trading_times, path.horizon());
  if (!s.rule) throw std::invalid_argument("simple strategy without a holdings rule");
  if (s.dim != path.dim()) throw std::invalid_argument("strategy dimension differs from path");
  RealizedStrategy r;
  r.trading_times = s.trading_times;
  for (std::size_t i = 0; i + 1 < s.trading_times.size(); ++i) {
    Vector h = s.rule(i, stop(path, s.trading_times[i], Side::right));
    if (h.size() != s.dim) throw std::invalid_argument("holdings rule returned wrong dimension");
    r.holdings.push_back(std::move(h));
  }
  r.initial_capital = s.initial_capital ? s.initial_capital(path.value(0)) : 0.0;
  return r;
}

Vector position(const RealizedStrategy& s, double t) {
  if (t == 0.0) return Vector(s.holdings.front().size(), 0.0);
  return s.holdings[cell_of(s, t)];
}

double simple_gain(const RealizedStrategy& s, const SampledPath& path, double t) {
  return gain_impl(s, path, t, false);
}

double simple_gain_left(const RealizedStrategy& s, const SampledPath& path, double t) {
  return gain_impl(s, path, t, true);
}

double simple_bond_holdings(const RealizedStrategy& s, const SampledPath& path, double t) {
  if (t == 0.0) return s.initial_capital;
  return bond_after(s, prices_at(path, s.trading_times), cell_of(s, t));
}

std::vector<double> gain_curve(const RealizedStrategy& s, const SampledPath& path,
                               std::span<const double> times) {
  const auto x = prices_at(path, s.trading_times);
  const auto prefix = gain_prefix(s, x);
  std::vector<double> out(times.size());
  for (std::size_t p = 0; p < times.size(); ++p) {
    const double t = times[p];
    if (t == 0.0) {
      out[p] = 0.0;
      continue;
    }
    const std::size_t k = cell_of(s, t);
    out[p] = prefix[k] + dot(s.holdings[k], subtract(path.value_at(t), x[k]));
  }
  return out;
}

StrategyLedger ledger_for(const RealizedStrategy& s, const SampledPath& path,
                          std::span<const double> times) {
  validate_times(s.trading_times, path.horizon());
  if (s.holdings.size() + 1 != s.trading_times.size())
    throw std::invalid_argument("one holding per trading cell is required");
  StrategyLedger l;
  l.dim = path.dim();
  l.initial_capital = s.initial_capital;
  l.times.assign(times.begin(), times.end());
  const auto x = prices_at(path, s.trading_times);
  l.gain = gain_curve(s, path, times);
  for (std::size_t p = 0; p < times.size(); ++p) {
    const double t = times[p];
    l.bond.push_back(t == 0.0 ? s.initial_capital : bond_after(s, x, cell_of(s, t)));
    l.value.push_back(s.initial_capital + l.gain[p]);
    l.position.push_back(position(s, t));
    l.prices.push_back(path.value_at(t));
  }
  for (std::size_t j : path.jump_indices()) {
    const double tau = path.time(j);
    StrategyLedger::JumpRecord rec;
    rec.time = tau;
    rec.value_jump = (s.initial_capital + simple_gain(s, path, tau)) -
                     (s.initial_capital + simple_gain_left(s, path, tau));
    rec.predicted = dot(position(s, tau), path.jump(j));
    l.jumps.push_back(rec);
  }
  // psi[i] is ψ after the rebalance at t_i, accumulated in bond_after's order.
  std::vector<double> psi(s.holdings.size());
  psi[0] = bond_after(s, x, 0);
  for (std::size_t i = 1; i < psi.size(); ++i)
    psi[i] = psi[i - 1] - dot(x[i], subtract(s.holdings[i], s.holdings[i - 1]));
  for (std::size_t i = 0; i + 1 < s.trading_times.size(); ++i) {
    StrategyLedger::RebalanceRecord rec;
    rec.time = s.trading_times[i];
    const double before = i == 0 ? s.initial_capital : psi[i - 1];
    rec.bond_change = psi[i] - before;
    const Vector prev = i == 0 ? Vector(l.dim, 0.0) : s.holdings[i - 1];
    rec.stock_cost = dot(x[i], subtract(s.holdings[i], prev));
    l.rebalances.push_back(rec);
  }
  return l;
}

StrategyLedger gain_from_vertical_form(const Functional& f, const SampledPath& path,
                                       const PartitionSequence& seq,
                                       const VerticalFormOptions& options) {
  if (seq.horizon() != path.horizon())
    throw std::invalid_argument("partition horizon differs from path horizon");
  const auto jt = path.jump_times();
  const PartitionSequence used = seq.covers(jt) ? seq : seq.refine_with(jt);
  const auto& io = options.integration;
  const int first = std::max(0, io.first_level);
  if (used.top_level() - first < 1)
    throw std::invalid_argument("a limit strategy needs at least two levels");
  const auto times = io.probe_times.empty() ? default_probe_times(path) : io.probe_times;
  const double v0 = f.eval(stop(path, 0.0, Side::right));

  std::vector<int> levels;
  std::vector<std::vector<double>> gains;
  RealizedStrategy top;
  for (int n = first; n <= used.top_level(); ++n) {
    RealizedStrategy r;
    const auto level = used.level(n);
    r.trading_times.assign(level.begin(), level.end());
    r.holdings = vertical_form_holdings(f, path, used, n, options.mode, io.derivatives);
    r.initial_capital = v0;
    levels.push_back(n);
    gains.push_back(gain_curve(r, path, times));
    if (n == used.top_level()) top = std::move(r);
  }
  StrategyLedger l = ledger_for(top, path, times);
  l.levels = std::move(levels);
  l.level_gains = std::move(gains);
  return l;
}

SelfFinancingReport self_financing_check(const StrategyLedger& l,
                                         const ConvergenceOptions& convergence, double tol_rel) {
  SelfFinancingReport r;
  double scale = std::max(1.0, std::abs(l.initial_capital));
  for (std::size_t p = 0; p < l.times.size(); ++p) {
    scale = std::max({scale, std::abs(l.value[p]), std::abs(l.gain[p]), std::abs(l.bond[p]),
                      norm(l.position[p]) * norm(l.prices[p])});
  }
  r.scale = scale;
  r.tolerance = tol_rel * scale;
  for (std::size_t p = 0; p < l.times.size(); ++p) {
    r.value_gain_error =
        std::max(r.value_gain_error, std::abs(l.value[p] - (l.initial_capital + l.gain[p])));
    r.portfolio_error = std::max(
        r.portfolio_error, std::abs(l.value[p] - (dot(l.position[p], l.prices[p]) + l.bond[p])));
  }
  for (const auto& j : l.jumps)
    r.jump_error = std::max(r.jump_error, std::abs(j.value_jump - j.predicted));
  for (const auto& rb : l.rebalances)
    r.rebalance_error = std::max(r.rebalance_error, std::abs(rb.bond_change + rb.stock_cost));
  r.value_gain_ok = r.value_gain_error <= r.tolerance;
  r.portfolio_ok = r.portfolio_error <= r.tolerance;
  r.jumps_ok = r.jump_error <= r.tolerance;
  r.rebalance_ok = r.rebalance_error <= r.tolerance;
  if (l.level_gains.size() >= 2) {
    const auto a = assess_convergence(l.level_gains, convergence);
    r.gain_converged = a.converged;
    r.gain_convergence_metric = a.metric;
  }
  return r;
}

std::vector<double> estimate_density(const SampledPath& path, std::size_t window) {
  if (path.dim() != 1) throw std::invalid_argument("density estimation needs a scalar path");
  if (window == 0) throw std::invalid_argument("density window must be positive");
  const std::size_t cells = path.size() - 1;
  std::vector<double> qv(cells + 1, 0.0);
  std::vector<double> dt(cells + 1, 0.0);
  for (std::size_t j = 0; j < cells; ++j) {
    const double dx = path.value(j + 1, 0) - path.value(j, 0);
    const double jump = path.has_jump(j + 1) ? path.jump(j + 1)[0] : 0.0;
    qv[j + 1] = qv[j] + dx * dx - jump * jump;
    dt[j + 1] = dt[j] + (path.time(j + 1) - path.time(j));
  }
  const std::size_t w = std::min(window, cells);
  std::vector<double> out(cells);
  for (std::size_t j = 0; j < cells; ++j) {
    std::size_t lo = j >= w / 2 ? j - w / 2 : 0;
    const std::size_t hi = std::min(cells, lo + w);
    lo = hi - w;
    out[j] = (qv[hi] - qv[lo]) / (dt[hi] - dt[lo]);
  }
  return out;
}

HedgeReport hedge(const Functional& f, const Payoff& payoff, const DensitySpec& model,
                  const SampledPath& path, const std::optional<DensitySpec>& realized,
                  const PartitionSequence& seq, const HedgeOptions& options) {
  if (!payoff) throw std::invalid_argument("hedge needs a payoff");
  if (seq.horizon() != path.horizon())
    throw std::invalid_argument("partition horizon differs from path horizon");
  const auto jt = path.jump_times();
  const PartitionSequence used = seq.covers(jt) ? seq : seq.refine_with(jt);
  HedgeReport r;
  r.trading_level = options.trading_level < 0 ? used.top_level() : options.trading_level;
  const auto level = used.level(r.trading_level);
  const PathMode mode = path.jumps().empty() ? PathMode::continuous : PathMode::cadlag;

  RealizedStrategy s;
  s.trading_times.assign(level.begin(), level.end());
  s.holdings = vertical_form_holdings(f, path, used, r.trading_level, mode, options.derivatives);
  r.initial_value = f.eval(stop(path, 0.0, Side::right));
  for (std::size_t j = 0; j < path.size() && !r.path_nonpositive; ++j)
    for (std::size_t c = 0; c < path.dim(); ++c)
      if (path.value(j, c) <= 0.0) r.path_nonpositive = true;
  s.initial_capital = r.initial_value;

  r.times.assign(path.grid().begin(), path.grid().end());
  const auto g = gain_curve(s, path, r.times);
  r.portfolio_value.reserve(r.times.size());
  r.functional_value.reserve(r.times.size());
  for (std::size_t j = 0; j < r.times.size(); ++j) {
    r.portfolio_value.push_back(r.initial_value + g[j]);
    r.functional_value.push_back(f.eval(stop(path, r.times[j], Side::right)));
    r.max_tracking_error =
        std::max(r.max_tracking_error, std::abs(r.portfolio_value[j] - r.functional_value[j]));
  }
  r.terminal_value = r.portfolio_value.back();
  r.payoff = payoff(path);
  r.realized_pnl = r.terminal_value - r.payoff;

  std::vector<double> estimated;
  if (!realized) {
    estimated = estimate_density(path, options.density_window);
    r.density_estimated = true;
  }
  for (std::size_t j = 0; j + 1 < path.size(); ++j) {
    const double t = path.time(j);
    const StoppedPath sp = stop(path, t, Side::right);
    Matrix diff = model(t, path.value(j));
    diff -= realized ? (*realized)(t, path.value(j)) : Matrix(1, estimated[j]);
    r.predicted_error +=
        0.5 * trace_product(diff, hessian(f, sp, options.derivatives)) * (path.time(j + 1) - t);
  }
  r.residual = std::abs(r.realized_pnl - r.predicted_error);
  r.relative_residual = r.predicted_error != 0.0 ? r.residual / std::abs(r.predicted_error)
                                                 : std::numeric_limits<double>::infinity();

  const std::size_t cells = path.size() - 1;
  const std::size_t samples = std::max<std::size_t>(1, std::min(options.fpde_samples, cells));
  for (std::size_t k = 0; k < samples; ++k) {
    const std::size_t j = k * cells / samples;
    r.fpde_max_residual = std::max(
        r.fpde_max_residual,
        std::abs(fpde_residual(f, model, stop(path, path.time(j), Side::right), options.derivatives)));
  }
  r.fpde_ok = r.fpde_max_residual <= options.fpde_tol * std::max(1.0, std::abs(r.initial_value));
  return r;
}

}  // namespace pathwise
