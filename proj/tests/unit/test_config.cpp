#include <gtest/gtest.h>

#include "rcdenoise/config.hpp"
#include "rcdenoise/error.hpp"

using namespace rcdenoise;

namespace {

ErrorKind config_error(const std::string& text) {
  try {
    (void)config_from_json(text);
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "config accepted: " << text;
  return ErrorKind::InvalidArgument;
}

}  // namespace

TEST(Config, LorenzDefaults) {
  const auto c = ExperimentConfig::lorenz_defaults();
  EXPECT_EQ(c.rows(), 10001u);
  EXPECT_EQ(c.train_rows(), 5000u);
  EXPECT_EQ(c.observed, (std::vector<std::string>{"x", "y"}));
  EXPECT_EQ(c.pipeline.baseline.n_nodes, 500u);
  EXPECT_EQ(c.pipeline.baseline.spectral_radius, 0.9);
  EXPECT_EQ(c.sweep.sigma_grid.size(), 41u);
  EXPECT_NO_THROW(c.validate());
}

TEST(Config, AdexDefaults) {
  const auto c = ExperimentConfig::adex_defaults();
  EXPECT_EQ(c.rows(), 40001u);
  EXPECT_EQ(c.system_channels(), (std::vector<std::string>{"V", "w"}));
  EXPECT_EQ(c.pipeline.space.n_nodes.lower, 50.0);
  EXPECT_EQ(c.pipeline.space.n_nodes.upper, 100.0);
  EXPECT_DOUBLE_EQ(c.sample_rate_hz(), 100000.0);
  EXPECT_NO_THROW(c.validate());
}

TEST(Config, ParsesKnownKeys) {
  const auto c = config_from_json(R"({
    "system": "lorenz",
    "lorenz": {"sigma": 8},
    "noise": {"train_snr": [1, 4], "test_snr": [16]},
    "pipeline": {"baseline": {"n_nodes": 200}, "search": {"budget": 12, "method": "random"},
                 "prune": {"accept_tolerance": 0.02}},
    "seeds": [3, 4],
    "output_dir": "out"
  })");
  EXPECT_EQ(c.lorenz.sigma, 8.0);
  EXPECT_EQ(c.train_snr, (std::vector<double>{1, 4}));
  EXPECT_EQ(c.pipeline.baseline.n_nodes, 200u);
  EXPECT_EQ(c.pipeline.space.n_nodes.lower, 200.0);
  EXPECT_EQ(c.pipeline.search.budget, 12u);
  EXPECT_EQ(c.pipeline.search.method, SearchMethod::Random);
  EXPECT_EQ(c.pipeline.prune.accept_tolerance, 0.02);
  EXPECT_EQ(c.seeds, (std::vector<std::uint64_t>{3, 4}));
  EXPECT_EQ(c.output_dir, "out");
}

TEST(Config, RoundTripsThroughJson) {
  auto c = ExperimentConfig::adex_defaults();
  c.seeds = {1, 2, 3};
  const auto back = config_from_json(config_to_json(c));
  EXPECT_EQ(config_to_json(back), config_to_json(c));
  EXPECT_EQ(config_hash(back), config_hash(c));
  c.seeds = {1};
  EXPECT_NE(config_hash(back), config_hash(c));
}

TEST(Config, RejectsUnknownKeys) {
  EXPECT_EQ(config_error(R"({"lorenz": {"prandtl": 10}})"), ErrorKind::Config);
  EXPECT_EQ(config_error(R"({"bogus": 1})"), ErrorKind::Config);
  EXPECT_EQ(config_error(R"({"pipeline": {"search": {"iterations": 3}}})"), ErrorKind::Config);
}

TEST(Config, RejectsInvalidValues) {
  EXPECT_EQ(config_error(R"({"system": "rossler"})"), ErrorKind::Config);
  EXPECT_EQ(config_error(R"({"train_end": 60})"), ErrorKind::Config);
  EXPECT_EQ(config_error(R"({"observed": ["q"]})"), ErrorKind::Config);
  EXPECT_EQ(config_error(R"({"noise": {"test_snr": [0]}})"), ErrorKind::Config);
  EXPECT_EQ(config_error(R"({"gain_stage": "pruned"})"), ErrorKind::Config);
  EXPECT_EQ(config_error(R"({"pipeline": {"search": {"budget": 0}}})"), ErrorKind::Config);
  EXPECT_EQ(config_error("{not json"), ErrorKind::Config);
}

TEST(Config, StageNames) {
  EXPECT_EQ(parse_stage("tuned"), Stage::Tuned);
  EXPECT_EQ(to_string(Stage::Truncated), "truncated");
  EXPECT_THROW((void)parse_stage("pruned"), Error);
}
