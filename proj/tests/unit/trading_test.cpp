#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <memory>

#include "oracles.hpp"
#include "pathwise/errors.hpp"
#include "pathwise/generators.hpp"
#include "pathwise/trading.hpp"

namespace pw = pathwise;

namespace {

pw::SampledPath walk(std::uint64_t seed, int level) {
  return pw::generate({pw::ScaledWalkSpec{}}, seed, pw::PartitionSequence::dyadic(1.0, level));
}

pw::SampledPath geometric(std::uint64_t seed, int level, double sigma) {
  return pw::generate({pw::GeometricWalkSpec{sigma, 1.0, 1}}, seed,
                      pw::PartitionSequence::dyadic(1.0, level));
}

pw::SampledPath geometric_with_jump(std::uint64_t seed, int level, double at, double size) {
  pw::GeneratorSpec spec{pw::WithJumpsSpec{
      std::make_shared<const pw::GeneratorSpec>(pw::GeneratorSpec{pw::GeometricWalkSpec{0.2, 1.0, 1}}),
      {{at, {size}}}}};
  return pw::generate(spec, seed, pw::PartitionSequence::dyadic(1.0, level));
}

pw::SimpleStrategy constant_strategy(std::vector<double> times, double units, bool fund_from_start) {
  pw::SimpleStrategy s;
  s.trading_times = std::move(times);
  s.rule = [units](std::size_t, const pw::StoppedPath&) { return pw::Vector{units}; };
  if (fund_from_start) s.initial_capital = [units](std::span<const double> x0) { return units * x0[0]; };
  return s;
}

/// ½ Σ (A - Ã) x² Γ dt on the finest grid with the closed-form gamma.
double predicted_bs_error(const pw::SampledPath& path, double model, double actual, double strike) {
  double sum = 0.0;
  for (std::size_t j = 0; j + 1 < path.size(); ++j) {
    const double t = path.time(j);
    const double x = path.value(j, 0);
    sum += 0.5 * (model * model - actual * actual) * x * x *
           oracle::bs_gamma(x, strike, model, 1.0 - t) * (path.time(j + 1) - t);
  }
  return sum;
}

}  // namespace

TEST(SimpleStrategy, TwoPeriodHandExample) {
  const pw::SampledPath path({0.0, 0.5, 1.0}, 1, {0.0, 0.5, 1.0});
  pw::SimpleStrategy s;
  s.trading_times = {0.0, 0.5, 1.0};
  s.rule = [](std::size_t i, const pw::StoppedPath&) { return pw::Vector{i + 1.0}; };
  const auto r = pw::realize(s, path);
  EXPECT_EQ(r.initial_capital, 0.0);
  EXPECT_EQ(pw::simple_gain(r, path, 1.0), 1.5);
  EXPECT_EQ(pw::simple_gain(r, path, 0.0), 0.0);
  EXPECT_EQ(pw::simple_bond_holdings(r, path, 1.0), -0.5);
  EXPECT_EQ(pw::simple_bond_holdings(r, path, 0.0), 0.0);
  EXPECT_EQ(pw::position(r, 1.0)[0], 2.0);
  EXPECT_EQ(pw::position(r, 0.5)[0], 1.0);
  EXPECT_EQ(pw::position(r, 0.0)[0], 0.0);
  const double v = pw::position(r, 1.0)[0] * 1.0 + pw::simple_bond_holdings(r, path, 1.0);
  EXPECT_EQ(v, r.initial_capital + pw::simple_gain(r, path, 1.0));
}

TEST(SimpleStrategy, BuyAndHoldIsFullyInvested) {
  const auto path = walk(3, 8);
  const auto level = oracle::dyadic(1.0, 5);
  const auto r = pw::realize(constant_strategy(level, 1.0, true), path);
  const auto s = oracle::samples(path);
  for (double t : oracle::dyadic(1.0, 8)) {
    EXPECT_NEAR(pw::simple_gain(r, path, t), oracle::value_at(s, t) - s.x[0], 1e-12);
    EXPECT_EQ(pw::simple_bond_holdings(r, path, t), t == 0.0 ? r.initial_capital : 0.0);
  }
  const auto l = pw::ledger_for(r, path, path.grid());
  const auto c = pw::self_financing_check(l);
  EXPECT_TRUE(c.passed());
  EXPECT_LT(c.portfolio_error, 1e-12);
  EXPECT_EQ(c.rebalance_error, 0.0);
}

TEST(SimpleStrategy, ZeroHoldingsKeepCapitalInBonds) {
  const auto path = walk(4, 6);
  auto s = constant_strategy(oracle::dyadic(1.0, 3), 0.0, false);
  s.initial_capital = [](std::span<const double>) { return 7.0; };
  const auto r = pw::realize(s, path);
  for (double t : oracle::dyadic(1.0, 6)) {
    EXPECT_EQ(pw::simple_gain(r, path, t), 0.0);
    EXPECT_EQ(pw::simple_bond_holdings(r, path, t), 7.0);
  }
}

TEST(SimpleStrategy, GainMatchesIndependentSum) {
  const auto path = walk(9, 9);
  const auto level = oracle::dyadic(1.0, 4);
  pw::SimpleStrategy s;
  s.trading_times = level;
  s.rule = [](std::size_t, const pw::StoppedPath& sp) { return pw::Vector{std::sin(sp.current(0))}; };
  const auto r = pw::realize(s, path);
  const auto smp = oracle::samples(path);
  for (double t : oracle::dyadic(1.0, 9)) {
    const double expected =
        t == 0.0 ? 0.0 : oracle::riemann_left([](double x) { return std::sin(x); }, smp, level, t);
    EXPECT_NEAR(pw::simple_gain(r, path, t), expected, 1e-12) << t;
  }
  const auto curve = pw::gain_curve(r, path, path.grid());
  for (std::size_t j = 0; j < path.size(); ++j)
    EXPECT_EQ(curve[j], pw::simple_gain(r, path, path.time(j)));
}

TEST(SimpleStrategy, RulesSeeOnlyThePast) {
  const auto path = walk(10, 6);
  pw::SimpleStrategy s;
  s.trading_times = oracle::dyadic(1.0, 2);
  s.rule = [](std::size_t, const pw::StoppedPath& sp) { return pw::Vector{sp.value_at(1.0)[0]}; };
  const auto r = pw::realize(s, path);
  for (std::size_t i = 0; i < r.holdings.size(); ++i)
    EXPECT_EQ(r.holdings[i][0], path.value_at(s.trading_times[i])[0]);
}

TEST(SimpleStrategy, RejectsBadInput) {
  const auto path = walk(1, 4);
  auto s = constant_strategy({0.0, 0.75, 0.5, 1.0}, 1.0, false);
  EXPECT_THROW(pw::realize(s, path), std::invalid_argument);
  s.trading_times = {0.0, 0.5, 1.0};
  s.rule = nullptr;
  EXPECT_THROW(pw::realize(s, path), std::invalid_argument);
  s = constant_strategy({0.0, 1.0}, 1.0, false);
  s.rule = [](std::size_t, const pw::StoppedPath&) { return pw::Vector{1.0, 2.0}; };
  EXPECT_THROW(pw::realize(s, path), std::invalid_argument);
}

TEST(Ledger, TamperingIsDetected) {
  const auto path = walk(12, 8);
  const auto r = pw::realize(constant_strategy(oracle::dyadic(1.0, 4), 1.0, true), path);
  const auto clean = pw::ledger_for(r, path, path.grid());
  ASSERT_TRUE(pw::self_financing_check(clean).passed());

  auto bond = clean;
  bond.bond[40] += 1e-6;
  const auto cb = pw::self_financing_check(bond);
  EXPECT_FALSE(cb.portfolio_ok);
  EXPECT_TRUE(cb.value_gain_ok);

  auto value = clean;
  value.value[17] -= 1e-6;
  const auto cv = pw::self_financing_check(value);
  EXPECT_FALSE(cv.value_gain_ok);

  auto rebalance = clean;
  rebalance.rebalances[3].bond_change += 1e-6;
  EXPECT_FALSE(pw::self_financing_check(rebalance).rebalance_ok);
}

TEST(Ledger, JumpConditionAndTampering) {
  const auto path = geometric_with_jump(5, 10, 0.5, 0.1);
  const auto seq = pw::PartitionSequence::dyadic(1.0, 10);
  const auto f = pw::black_scholes_functional(0.2, 1.0, 1.0);
  const auto l = pw::gain_from_vertical_form(f, path, seq);
  ASSERT_EQ(l.jumps.size(), 1u);
  EXPECT_EQ(l.jumps[0].time, 0.5);
  EXPECT_NEAR(l.jumps[0].value_jump, l.jumps[0].predicted, 1e-14);
  // φ(τ) is the holding set at the previous trading time, before the jump
  const double before = 0.5 - std::ldexp(1.0, -10);
  const auto s = oracle::samples(path);
  const double delta = oracle::bs_call_delta(oracle::value_at(s, before), 1.0, 0.2, 1.0 - before);
  EXPECT_NEAR(l.jumps[0].predicted, delta * 0.1, 1e-12);
  const auto c = pw::self_financing_check(l);
  EXPECT_TRUE(c.jumps_ok);
  EXPECT_TRUE(c.portfolio_ok);
  EXPECT_TRUE(c.value_gain_ok);
  EXPECT_TRUE(c.rebalance_ok);

  auto tampered = l;
  tampered.jumps[0].value_jump += 1e-6;
  EXPECT_FALSE(pw::self_financing_check(tampered).jumps_ok);
}

TEST(VerticalForm, IdentityGainsAtEveryLevel) {
  const auto path = walk(14, 9);
  const auto seq = pw::PartitionSequence::dyadic(1.0, 9);
  const auto l = pw::gain_from_vertical_form(pw::identity_functional(), path, seq);
  const auto s = oracle::samples(path);
  ASSERT_EQ(l.level_gains.size(), 10u);
  for (const auto& row : l.level_gains)
    for (std::size_t p = 0; p < l.times.size(); ++p)
      EXPECT_NEAR(row[p], oracle::value_at(s, l.times[p]) - s.x[0], 1e-12);
  for (const auto& pos : l.position) EXPECT_TRUE(pos[0] == 1.0 || pos[0] == 0.0);
  EXPECT_TRUE(pw::self_financing_check(l).passed());
}

TEST(VerticalForm, AsianForwardOnLinearPath) {
  const auto seq = pw::PartitionSequence::dyadic(1.0, 12);
  const auto path = pw::generate({pw::named_smooth("linear")}, 0, seq);
  const auto l = pw::gain_from_vertical_form(pw::asian_forward_functional(1.0), path, seq);
  EXPECT_EQ(l.times.back(), 1.0);
  EXPECT_LE(std::abs(l.gain.back() - 0.5), std::ldexp(1.0, -12));
}

TEST(VerticalForm, BlackScholesAgreesWithTheFollmerIntegral) {
  const auto path = geometric(15, 12, 0.2);
  const auto seq = pw::PartitionSequence::dyadic(1.0, 12);
  const auto f = pw::black_scholes_functional(0.2, 1.0, 1.0);
  pw::VerticalFormOptions opts;
  opts.mode = pw::PathMode::continuous;
  const auto l = pw::gain_from_vertical_form(f, path, seq, opts);
  const auto integral = pw::follmer_integral_functional(f, path, seq);
  ASSERT_EQ(integral.probe_times, l.times);
  for (std::size_t p = 0; p < l.times.size(); ++p) EXPECT_NEAR(l.gain[p], integral.limit[p], 1e-12);
  const auto c = pw::self_financing_check(l);
  EXPECT_LE(c.portfolio_error, 1e-10 * c.scale);
  EXPECT_TRUE(c.value_gain_ok && c.portfolio_ok && c.rebalance_ok);
}

TEST(Hedge, AsianForwardReplicatesTheAverage) {
  const auto path = walk(16, 11);
  const auto seq = pw::PartitionSequence::dyadic(1.0, 11);
  const auto r = pw::hedge(pw::asian_forward_functional(1.0), pw::average_payoff(),
                           pw::DensitySpec::constant(pw::Matrix(1, 1.0)), path,
                           pw::DensitySpec::constant(pw::Matrix(1, 1.0)), seq);
  EXPECT_EQ(r.predicted_error, 0.0);
  EXPECT_LT(std::abs(r.realized_pnl), 1e-12);
  EXPECT_LT(r.max_tracking_error, 1e-12);
  EXPECT_TRUE(r.fpde_ok);
  EXPECT_EQ(r.times.size(), path.size());
  EXPECT_EQ(r.portfolio_value.size(), path.size());
}

TEST(Hedge, NonPositivePricesAreFlaggedNotRejected) {
  const auto seq = pw::PartitionSequence::dyadic(1.0, 8);
  const auto unit = pw::DensitySpec::constant(pw::Matrix(1, 1.0));
  const std::vector<double> grid = oracle::dyadic(1.0, 8);
  std::vector<double> v;
  for (double t : grid) v.push_back(0.5 - t);
  const pw::SampledPath down(grid, 1, v);
  const auto r = pw::hedge(pw::asian_forward_functional(1.0), pw::average_payoff(), unit, down, unit, seq);
  EXPECT_TRUE(r.path_nonpositive);
  EXPECT_LT(std::abs(r.realized_pnl), 1e-12);

  for (double& x : v) x += 1.0;
  const pw::SampledPath up(grid, 1, v);
  EXPECT_FALSE(
      pw::hedge(pw::asian_forward_functional(1.0), pw::average_payoff(), unit, up, unit, seq).path_nonpositive);
}

TEST(Hedge, MatchedVolatilityTracksThePrice) {
  const auto seq = pw::PartitionSequence::dyadic(1.0, 14);
  const auto f = pw::black_scholes_functional(0.2, 1.0, 1.0);
  const auto model = pw::DensitySpec::geometric(0.2);
  const auto path = geometric(17, 14, 0.2);
  std::vector<double> pnl;
  for (int level : {8, 10, 12, 14}) {
    pw::HedgeOptions opts;
    opts.trading_level = level;
    const auto r = pw::hedge(f, pw::vanilla_payoff(1.0, pw::OptionType::call), model, path, model, seq, opts);
    EXPECT_EQ(r.predicted_error, 0.0);
    EXPECT_TRUE(r.fpde_ok);
    EXPECT_EQ(r.trading_level, level);
    pnl.push_back(std::abs(r.realized_pnl));
    if (level == 14) EXPECT_LT(r.max_tracking_error, 5e-3);
  }
  EXPECT_LT(pnl.back(), pnl.front());
  EXPECT_LT(pnl.back(), 5e-3);
}

TEST(Hedge, MisspecifiedVolatilityErrorFormula) {
  const auto seq = pw::PartitionSequence::dyadic(1.0, 14);
  const auto f = pw::black_scholes_functional(0.2, 1.0, 1.0);
  const auto path = geometric(18, 14, 0.3);
  const auto r = pw::hedge(f, pw::vanilla_payoff(1.0, pw::OptionType::call),
                           pw::DensitySpec::geometric(0.2), path, pw::DensitySpec::geometric(0.3), seq);
  const double oracle_pred = predicted_bs_error(path, 0.2, 0.3, 1.0);
  EXPECT_NEAR(r.predicted_error, oracle_pred, 1e-9 * std::abs(oracle_pred));
  EXPECT_LT(r.predicted_error, 0.0);
  EXPECT_LT(r.realized_pnl, 0.0);
  EXPECT_LT(r.relative_residual, 0.02);
  EXPECT_EQ(r.residual, std::abs(r.realized_pnl - r.predicted_error));
}

TEST(Hedge, OverestimatedVolatilityIsASuperStrategy) {
  const auto seq = pw::PartitionSequence::dyadic(1.0, 13);
  const auto f = pw::black_scholes_functional(0.3, 1.0, 1.0);
  for (std::uint64_t seed = 30; seed < 36; ++seed) {
    const auto path = geometric(seed, 13, 0.2);
    const auto r = pw::hedge(f, pw::vanilla_payoff(1.0, pw::OptionType::call),
                             pw::DensitySpec::geometric(0.3), path, pw::DensitySpec::geometric(0.2), seq);
    EXPECT_GT(r.predicted_error, 0.0);
    EXPECT_GE(r.realized_pnl, -1e-3) << seed;
  }
}

TEST(Hedge, EstimatedDensityIsCloseToTheTrueOne) {
  const auto seq = pw::PartitionSequence::dyadic(1.0, 14);
  const auto f = pw::black_scholes_functional(0.2, 1.0, 1.0);
  const auto path = geometric(19, 14, 0.3);
  const auto model = pw::DensitySpec::geometric(0.2);
  const auto supplied = pw::hedge(f, pw::vanilla_payoff(1.0, pw::OptionType::call), model, path,
                                  pw::DensitySpec::geometric(0.3), seq);
  const auto estimated =
      pw::hedge(f, pw::vanilla_payoff(1.0, pw::OptionType::call), model, path, std::nullopt, seq);
  EXPECT_TRUE(estimated.density_estimated);
  EXPECT_FALSE(supplied.density_estimated);
  EXPECT_EQ(estimated.realized_pnl, supplied.realized_pnl);
  EXPECT_NEAR(estimated.predicted_error, supplied.predicted_error, 0.05 * std::abs(supplied.predicted_error));
}

TEST(Hedge, FpdeViolationIsFlaggedButEvaluated) {
  const auto seq = pw::PartitionSequence::dyadic(1.0, 10);
  const auto path = geometric(20, 10, 0.2);
  const auto r = pw::hedge(pw::black_scholes_functional(0.2, 1.0, 1.0),
                           pw::vanilla_payoff(1.0, pw::OptionType::call),
                           pw::DensitySpec::geometric(0.35), path, pw::DensitySpec::geometric(0.2), seq);
  EXPECT_FALSE(r.fpde_ok);
  EXPECT_GT(r.fpde_max_residual, 1e-3);
  EXPECT_TRUE(std::isfinite(r.realized_pnl));
  EXPECT_NE(r.predicted_error, 0.0);
}

TEST(EstimateDensity, RecoversConstantRate) {
  const auto path = pw::generate({pw::ScaledWalkSpec{0.5, 0.0, 1}}, 3, pw::PartitionSequence::dyadic(1.0, 10));
  for (double a : pw::estimate_density(path, 64)) EXPECT_NEAR(a, 0.25, 1e-12);
  EXPECT_THROW(pw::estimate_density(path, 0), std::invalid_argument);
}

TEST(Plausibility, IdentityHoldsOnAWalk) {
  const auto path = walk(22, 11);
  const auto seq = pw::PartitionSequence::dyadic(1.0, 11);
  const auto r = pw::plausibility_diagnostic(path, seq);
  ASSERT_EQ(r.levels.size(), 11u);
  for (const auto& l : r.levels) {
    EXPECT_LT(l.identity_error, 1e-12) << l.level;
    EXPECT_LT(l.strategy_identity_error, 1e-12) << l.level;
    EXPECT_GE(l.min_slack, -1e-15);
  }
}

TEST(Plausibility, WalkPartialSumsLevelOff) {
  const auto seq = pw::PartitionSequence::dyadic(1.0, 14);
  for (std::uint64_t seed : {22u, 23u, 24u}) {
    const auto r = pw::plausibility_diagnostic(walk(seed, 14), seq);
    EXPECT_TRUE(r.bounded) << seed << " tail " << r.tail_fraction;
  }
}

TEST(Plausibility, KnMatchesIndependentComputation) {
  const auto path = walk(23, 9);
  const auto seq = pw::PartitionSequence::dyadic(1.0, 9);
  const auto r = pw::plausibility_diagnostic(path, seq);
  const auto s = oracle::samples(path);
  double partial = 0.0;
  for (const auto& l : r.levels) {
    const auto fine = oracle::dyadic(1.0, l.level);
    const auto coarse = oracle::dyadic(1.0, l.level - 1);
    double kn = 0.0;
    double cross_neg = 0.0;
    for (double t : s.t) {
      const double d = oracle::qv_truncated(s, fine, t) - oracle::qv_truncated(s, coarse, t);
      kn = std::max(kn, -d);
      const double c = oracle::cross_sum(s, coarse, fine, t);
      EXPECT_NEAR(d, -2.0 * c, 1e-12);
      cross_neg = std::max(cross_neg, -2.0 * c);
    }
    partial += kn;
    EXPECT_NEAR(l.k_n, kn, 1e-12) << l.level;
    EXPECT_NEAR(l.cross_negative_part, cross_neg, 1e-12) << l.level;
    EXPECT_NEAR(l.k_partial_sum, partial, 1e-12);
  }
}

TEST(Plausibility, SmoothPathIsBounded) {
  const auto seq = pw::PartitionSequence::dyadic(1.0, 12);
  const auto r = pw::plausibility_diagnostic(pw::generate({pw::named_smooth("sin")}, 0, seq), seq);
  EXPECT_TRUE(r.bounded);
  EXPECT_LT(r.levels.back().k_n, 1e-3);
  EXPECT_LT(r.levels.back().k_partial_sum, 1.0);
}

TEST(Plausibility, OscillatingPathIsNotBounded) {
  const auto path = pw::oscillating_path(1.0, 12);
  const auto seq = pw::PartitionSequence::dyadic(1.0, 12);
  const auto r = pw::plausibility_diagnostic(path, seq);
  EXPECT_FALSE(r.bounded);
  EXPECT_GT(r.tail_fraction, 0.2);
  for (const auto& l : r.levels) EXPECT_LT(l.identity_error, 1e-12);
}

TEST(Plausibility, RejectsVectorPathsAndLooseSequences) {
  const auto seq = pw::PartitionSequence::dyadic(1.0, 4);
  const auto v = pw::generate({pw::ScaledWalkSpec{1.0, 0.0, 2}}, 1, seq);
  EXPECT_THROW(pw::plausibility_diagnostic(v, seq), std::invalid_argument);
  const auto loose = pw::PartitionSequence::from_levels(1.0, {{0, 1}, {0, 0.5, 1}, {0, 0.25, 0.75, 1}}, false);
  const pw::SampledPath p({0.0, 0.25, 0.5, 0.75, 1.0}, 1, {0, 1, 0, 1, 0});
  EXPECT_THROW(pw::plausibility_diagnostic(p, loose), std::invalid_argument);
}
