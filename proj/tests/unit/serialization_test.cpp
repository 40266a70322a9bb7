#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <memory>
#include <sstream>

#include "pathwise/generators.hpp"
#include "pathwise/path_io.hpp"
#include "pathwise/serialization.hpp"
#include "pathwise_app/config.hpp"

namespace pw = pathwise;

namespace {

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

std::size_t line_count(const std::string& s) {
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

}  // namespace

TEST(FormatDouble, RoundTripsExactly) {
  for (double v : {0.0, -0.0, 1.0, 0.1, 1.0 / 3.0, 1e-300, -2.5e17, std::ldexp(1.0, -40),
                   std::numeric_limits<double>::max(), std::numeric_limits<double>::denorm_min()}) {
    const std::string s = pw::format_double(v);
    EXPECT_EQ(std::strtod(s.c_str(), nullptr), v) << s;
  }
  EXPECT_EQ(pw::format_double(0.5), "0.5");
  EXPECT_EQ(pw::format_double(3.0), "3");
}

TEST(PathCsv, RoundTripWithJumps) {
  pw::GeneratorSpec spec{pw::WithJumpsSpec{
      std::make_shared<const pw::GeneratorSpec>(pw::GeneratorSpec{pw::ScaledWalkSpec{0.7, 1.0, 2}}),
      {{0.375, {0.25, -0.5}}}}};
  const auto path = pw::generate(spec, 11, pw::PartitionSequence::dyadic(1.0, 6));
  std::stringstream ss;
  pw::write_path_csv(ss, path);
  EXPECT_EQ(first_line(ss.str()), "t,x1,x2,jump1,jump2");
  const auto back = pw::read_path_csv(ss);
  ASSERT_EQ(back.size(), path.size());
  ASSERT_EQ(back.dim(), 2u);
  for (std::size_t i = 0; i < path.size(); ++i) {
    EXPECT_EQ(back.time(i), path.time(i));
    for (std::size_t c = 0; c < 2; ++c) EXPECT_EQ(back.value(i, c), path.value(i, c));
  }
  ASSERT_EQ(back.jumps().size(), 1u);
  EXPECT_EQ(back.jumps()[0].time, 0.375);
  EXPECT_EQ(back.jumps()[0].size, path.jumps()[0].size);
}

TEST(PathCsv, ContinuousPathHasNoJumpColumns) {
  const auto path = pw::generate({pw::named_smooth("sin")}, 0, pw::PartitionSequence::dyadic(1.0, 3));
  std::stringstream ss;
  pw::write_path_csv(ss, path);
  EXPECT_EQ(first_line(ss.str()), "t,x1");
  EXPECT_EQ(line_count(ss.str()), 10u);
  EXPECT_TRUE(pw::read_path_csv(ss).jumps().empty());
}

TEST(PathCsv, TinyJumpEntriesAreZero) {
  std::stringstream ss("t,x1,jump1\n0,0,0\n0.5,1,1e-17\n1,2,0.25\n");
  const auto p = pw::read_path_csv(ss);
  ASSERT_EQ(p.jumps().size(), 1u);
  EXPECT_EQ(p.jumps()[0].time, 1.0);
}

TEST(PathCsv, RejectsMalformedInput) {
  const char* bad[] = {"", "x,t\n0,1\n1,2\n", "t\n0\n1\n", "t,x1\n0,1\n", "t,x1\n0,1\n1,abc\n",
                       "t,x1\n0,1\n1,2,3\n", "t,x1,jump1\n0,0,1\n1,1,0\n", "t,x1,x2,jump1\n0,0,0,0\n1,1,1,0\n"};
  for (const char* text : bad) {
    std::stringstream ss(text);
    EXPECT_THROW(pw::read_path_csv(ss), std::invalid_argument) << text;
  }
  EXPECT_THROW(pw::read_path_csv_file("/nonexistent/path.csv"), std::runtime_error);
}

TEST(PartitionJson, DyadicRoundTrip) {
  const auto seq = pw::PartitionSequence::dyadic(2.0, 7).refine_with(std::vector<double>{0.3});
  const auto j = pw::partition_to_json(seq);
  EXPECT_EQ(j.at("type"), "dyadic");
  const auto back = pw::partition_from_json(j);
  EXPECT_EQ(back.levels(), seq.levels());
  EXPECT_EQ(back.horizon(), 2.0);
  EXPECT_EQ(pw::partition_to_json(back), j);
}

TEST(PartitionJson, ExplicitRoundTrip) {
  const auto seq = pw::PartitionSequence::from_levels(1.0, {{0, 1}, {0, 0.4, 1}, {0, 0.2, 0.4, 0.7, 1}}, true);
  const auto back = pw::partition_from_json(pw::partition_to_json(seq));
  EXPECT_EQ(back.levels(), seq.levels());
  EXPECT_TRUE(back.dense());
  EXPECT_EQ(back.nested(), seq.nested());
}

TEST(PartitionJson, RejectsIncompleteSpecs) {
  EXPECT_THROW(pw::partition_from_json(pw::Json{{"type", "dyadic"}}), std::invalid_argument);
  EXPECT_THROW(pw::partition_from_json(pw::Json{{"type", "explicit"}}), std::invalid_argument);
  EXPECT_THROW(pw::partition_from_json(pw::Json{{"type", "hexadic"}, {"max_level", 3}}),
               std::invalid_argument);
}

TEST(FunctionalSpecJson, RoundTrip) {
  pw::FunctionalSpec s;
  s.name = "black_scholes";
  s.sigma = 0.25;
  s.strike = 1.1;
  s.maturity = 2.0;
  s.option = pw::OptionType::put;
  const auto back = pw::functional_spec_from_json(pw::functional_spec_to_json(s));
  EXPECT_EQ(back.name, s.name);
  EXPECT_EQ(back.sigma, s.sigma);
  EXPECT_EQ(back.strike, s.strike);
  EXPECT_EQ(back.maturity, s.maturity);
  EXPECT_EQ(back.option, s.option);

  pw::FunctionalSpec c;
  c.name = "cylinder";
  c.cylinder = "sum_squares";
  c.dim = 3;
  const auto cb = pw::functional_spec_from_json(pw::functional_spec_to_json(c));
  EXPECT_EQ(cb.cylinder, "sum_squares");
  EXPECT_EQ(cb.dim, 3u);
  EXPECT_THROW(pw::functional_spec_from_json(pw::Json{{"name", "black_scholes"}, {"option", "straddle"}}),
               std::invalid_argument);
  EXPECT_THROW(pw::functional_spec_from_json(pw::Json::object()), std::invalid_argument);
}

TEST(ReportJson, QvReportCarriesConvergence) {
  const auto seq = pw::PartitionSequence::dyadic(1.0, 8);
  const auto r = pw::qv_along(pw::generate({pw::named_smooth("linear")}, 0, seq), seq);
  const auto j = pw::to_json(r);
  EXPECT_EQ(j.at("levels").size(), r.levels.size());
  EXPECT_EQ(j.at("limit").get<std::vector<double>>(), r.limit);
  EXPECT_EQ(j.at("convergence").at("converged").get<bool>(), r.converged());
}

TEST(ReportJson, HedgeAndPlausibilityFields) {
  const auto seq = pw::PartitionSequence::dyadic(1.0, 8);
  const auto path = pw::generate({pw::GeometricWalkSpec{}}, 2, seq);
  const auto model = pw::DensitySpec::geometric(0.2);
  const auto h = pw::hedge(pw::black_scholes_functional(0.2, 1.0, 1.0),
                           pw::vanilla_payoff(1.0, pw::OptionType::call), model, path, model, seq);
  const auto hj = pw::to_json(h);
  for (const char* key : {"realized_pnl", "predicted_error", "residual", "fpde_ok", "trading_level"})
    EXPECT_TRUE(hj.contains(key)) << key;
  EXPECT_EQ(hj.at("realized_pnl").get<double>(), h.realized_pnl);

  const auto p = pw::plausibility_diagnostic(path, seq);
  const auto pj = pw::to_json(p);
  EXPECT_EQ(pj.at("levels").size(), p.levels.size());
  EXPECT_EQ(pj.at("bounded").get<bool>(), p.bounded);
}

TEST(Csv, LevelTableShape) {
  const std::vector<int> levels{3, 4};
  const std::vector<double> times{0.0, 0.5, 1.0};
  std::stringstream ss;
  pw::write_level_table_csv(ss, levels, times, {{1, 2, 3}, {4, 5, 6}});
  EXPECT_EQ(ss.str(), "level,t,value\n3,0,1\n3,0.5,2\n3,1,3\n4,0,4\n4,0.5,5\n4,1,6\n");
  std::stringstream bad;
  EXPECT_THROW(pw::write_level_table_csv(bad, levels, times, {{1, 2, 3}}), std::invalid_argument);
}

TEST(Csv, LedgerHedgeAndPlausibilityHeaders) {
  const auto seq = pw::PartitionSequence::dyadic(1.0, 6);
  const auto path = pw::generate({pw::ScaledWalkSpec{1.0, 0.0, 2}}, 3, seq);
  const auto l = pw::gain_from_vertical_form(pw::identity_functional(2, 1), path, seq);
  std::stringstream ledger;
  pw::write_ledger_csv(ledger, l);
  EXPECT_EQ(first_line(ledger.str()), "t,value,gain,bond,phi1,phi2,x1,x2");
  EXPECT_EQ(line_count(ledger.str()), l.times.size() + 1);

  const auto scalar = pw::generate({pw::GeometricWalkSpec{}}, 3, seq);
  const auto model = pw::DensitySpec::geometric(0.2);
  const auto h = pw::hedge(pw::black_scholes_functional(0.2, 1.0, 1.0),
                           pw::vanilla_payoff(1.0, pw::OptionType::call), model, scalar, model, seq);
  std::stringstream curve;
  pw::write_hedge_curve_csv(curve, h);
  EXPECT_EQ(first_line(curve.str()), "t,portfolio,functional,difference");
  EXPECT_EQ(line_count(curve.str()), scalar.size() + 1);

  std::stringstream plaus;
  pw::write_plausibility_csv(plaus, pw::plausibility_diagnostic(scalar, seq));
  EXPECT_EQ(first_line(plaus.str()),
            "level,identity_error,strategy_identity_error,k_n,min_slack,cross_negative_part,"
            "k_partial_sum,cross_partial_sum");
  EXPECT_EQ(line_count(plaus.str()), 7u);
}

TEST(ExperimentConfig, JsonRoundTrip) {
  const pw::Json j = {
      {"seed", 42},
      {"partition", {{"type", "dyadic"}, {"T", 1.0}, {"max_level", 9}}},
      {"path", {{"generator", "geometric_walk"}, {"sigma", 0.3}, {"x0", 1.0}}},
      {"functional", {{"name", "black_scholes"}, {"sigma", 0.2}, {"strike", 1.0}, {"maturity", 1.0}}},
      {"tolerances", {{"qv_tol", 1e-4}}},
      {"hedge", {{"paths", 8}, {"model_sigma", 0.2}, {"realized_sigma", 0.3}}},
      {"level", 7}};
  const auto c = pathwise::app::config_from_json(j, {});
  EXPECT_EQ(c.seed, 42u);
  EXPECT_EQ(c.tolerances.qv_tol, 1e-4);
  EXPECT_EQ(c.tolerances.conv_tol, 1e-3);
  EXPECT_EQ(c.hedge.paths, 8u);
  ASSERT_TRUE(c.level.has_value());
  EXPECT_EQ(*c.level, 7);
  const auto again = pathwise::app::config_to_json(pathwise::app::config_from_json(pathwise::app::config_to_json(c), {}));
  EXPECT_EQ(again, pathwise::app::config_to_json(c));
}

TEST(ExperimentConfig, RejectsBadValues) {
  using pathwise::app::ConfigError;
  using pathwise::app::config_from_json;
  EXPECT_THROW(config_from_json(pw::Json::array(), {}), ConfigError);
  EXPECT_THROW(config_from_json({{"path", {{"generator", "brownian"}}}}, {}), ConfigError);
  EXPECT_THROW(config_from_json({{"seed", "seven"}}, {}), ConfigError);
  EXPECT_THROW(config_from_json({{"hedge", {{"payoff", "digital"}}}}, {}), ConfigError);
  EXPECT_THROW(config_from_json({{"functional", {{"name", "black_scholes"}, {"option", "x"}}}}, {}), ConfigError);
  EXPECT_THROW(pathwise::app::load_config("/nonexistent/config.json"), ConfigError);
}
