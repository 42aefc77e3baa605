#include <gtest/gtest.h>

#include <cmath>

#include "fixtures.hpp"
#include "rcdenoise/error.hpp"
#include "rcdenoise/hyperopt.hpp"

using namespace rcdenoise;

namespace {

EvalOutcome bowl(const HyperParams& phi) {
  EvalOutcome out;
  out.loss = std::pow(phi.leakage - 0.3, 2) + std::pow(phi.spectral_radius - 0.6, 2);
  return out;
}

SearchSpace two_dim_space() {
  SearchSpace s;
  s.input_scaling = {1.0, 1.0};
  s.connectivity = {0.3, 0.3};
  return s;
}

}  // namespace

TEST(Optimize, FindsMinimumOfConvexMock) {
  const auto res = optimize(two_dim_space(), bowl, {60, SearchMethod::Surrogate, 2000, 1}, 1);
  EXPECT_NEAR(res.best.leakage, 0.3, 0.05);
  EXPECT_NEAR(res.best.spectral_radius, 0.6, 0.05);
  EXPECT_EQ(res.history.size(), 60u);
}

TEST(Optimize, FiveDimensionalMockStaysInBounds) {
  SearchSpace s;
  s.n_nodes = {20, 60};
  auto loss = [](const HyperParams& phi) {
    EvalOutcome o;
    o.loss = std::pow(phi.leakage - 0.5, 2) + std::pow(phi.input_scaling - 1.5, 2) +
             std::pow(static_cast<double>(phi.n_nodes) - 40.0, 2) / 400.0;
    return o;
  };
  const auto res = optimize(s, loss, {40, SearchMethod::Surrogate, 500, 1}, 3);
  for (const auto& r : res.history) EXPECT_TRUE(s.contains(r.phi));
  EXPECT_TRUE(s.contains(res.best));
}

TEST(Optimize, DegenerateSpaceReturnsThePoint) {
  SearchSpace s;
  s.leakage = {0.4, 0.4};
  s.spectral_radius = {0.7, 0.7};
  s.input_scaling = {1.0, 1.0};
  s.connectivity = {0.2, 0.2};
  const auto res = optimize(s, bowl, {10, SearchMethod::Surrogate, 100, 1}, 1);
  EXPECT_EQ(res.best.leakage, 0.4);
  EXPECT_EQ(res.best.spectral_radius, 0.7);
  EXPECT_EQ(res.best.n_nodes, 100u);
}

TEST(Optimize, ZeroBudgetIsRejected) {
  EXPECT_THROW((void)optimize(two_dim_space(), bowl, {0, SearchMethod::Surrogate, 100, 1}, 1), Error);
}

TEST(Optimize, BestSeenIsMonotoneAndReproducible) {
  for (auto method : {SearchMethod::Surrogate, SearchMethod::Random}) {
    const auto a = optimize(two_dim_space(), bowl, {25, method, 300, 1}, 9);
    const auto b = optimize(two_dim_space(), bowl, {25, method, 300, 1}, 9);
    ASSERT_EQ(a.history.size(), b.history.size());
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < a.history.size(); ++i) {
      EXPECT_EQ(a.history[i].phi, b.history[i].phi);
      EXPECT_EQ(a.history[i].loss, b.history[i].loss);
      best = std::min(best, a.history[i].loss);
    }
    EXPECT_EQ(best, a.best_loss);
  }
}

TEST(Optimize, ParallelWarmupMatchesSerial) {
  const auto a = optimize(two_dim_space(), bowl, {20, SearchMethod::Surrogate, 300, 1}, 4);
  const auto b = optimize(two_dim_space(), bowl, {20, SearchMethod::Surrogate, 300, 3}, 4);
  for (std::size_t i = 0; i < a.history.size(); ++i) EXPECT_EQ(a.history[i].phi, b.history[i].phi);
}

TEST(Optimize, FailedEvaluationsAreSkipped) {
  auto loss = [](const HyperParams& phi) {
    if (phi.leakage > 0.5) return EvalOutcome::failure("unstable");
    return bowl(phi);
  };
  const auto res = optimize(two_dim_space(), loss, {30, SearchMethod::Surrogate, 300, 1}, 2);
  EXPECT_LE(res.best.leakage, 0.5);
  bool any_failed = false;
  for (const auto& r : res.history) any_failed |= r.failed;
  EXPECT_TRUE(any_failed);
}

TEST(Optimize, AllFailedIsNoFeasiblePoint) {
  auto loss = [](const HyperParams&) { return EvalOutcome::failure("always"); };
  try {
    (void)optimize(two_dim_space(), loss, {5, SearchMethod::Surrogate, 100, 1}, 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NoFeasiblePoint);
  }
}

TEST(SearchSpaceTest, RejectsInvertedBounds) {
  SearchSpace s;
  s.leakage = {0.8, 0.2};
  EXPECT_THROW(s.validate(), Error);
}

TEST(Objective, DeterministicOnLorenz) {
  const auto d = fixture::lorenz_data(fixture::small_lorenz(), 4.0, 0);
  ObjectiveSettings settings;
  settings.reservoir.bias_scale = 1.0;
  const HyperParams phi{60, 0.8, 0.9, 1.0, 0.3};
  const auto a = objective(phi, d.data, settings);
  const auto b = objective(phi, d.data, settings);
  EXPECT_FALSE(a.failed);
  EXPECT_EQ(a.loss, b.loss);
  EXPECT_EQ(a.lambda, b.lambda);
}

TEST(Objective, NearFrozenReservoirLosesToSearchOptimum) {
  const auto d = fixture::lorenz_data(fixture::small_lorenz(), 4.0, 0);
  ObjectiveSettings settings;
  settings.reservoir.bias_scale = 1.0;
  const auto frozen = objective({60, 0.01, 0.01, 1.0, 0.3}, d.data, settings);
  auto space = SearchSpace::with_fixed_nodes(60);
  const auto res = optimize(space, make_objective(d.data, settings), {16, SearchMethod::Surrogate, 500, 1}, 5);
  EXPECT_LT(res.best_loss, frozen.loss);
}

TEST(Objective, NonFiniteStateIsAFailureMarker) {
  auto d = fixture::lorenz_data(fixture::small_lorenz(), 4.0, 0);
  // Poison one input row so the reservoir state goes non-finite.
  auto poisoned = std::make_shared<Trajectory>(*d.data.train.front().inputs);
  poisoned->values(50, 0) = std::numeric_limits<double>::quiet_NaN();
  for (auto& seg : d.data.train) seg.inputs = poisoned;
  for (auto& seg : d.data.validation) seg.inputs = poisoned;
  ObjectiveSettings settings;
  settings.standardize = false;
  const auto out = objective({30, 1.0, 0.9, 1.0, 0.3}, d.data, settings);
  EXPECT_TRUE(out.failed);
}
