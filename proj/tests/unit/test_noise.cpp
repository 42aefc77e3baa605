#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "rcdenoise/dynamics.hpp"
#include "rcdenoise/error.hpp"
#include "rcdenoise/metrics.hpp"
#include "rcdenoise/noise.hpp"

using namespace rcdenoise;

namespace {

double sample_std(const std::vector<double>& v) {
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

}  // namespace

TEST(GaussianWhite, ZeroSigmaIsZero) {
  for (double x : gaussian_white(100, 0.0, 3)) EXPECT_EQ(x, 0.0);
}

TEST(GaussianWhite, SampleStdNearSigma) {
  const double s = sample_std(gaussian_white(100000, 1.0, 11));
  EXPECT_GE(s, 0.99);
  EXPECT_LE(s, 1.01);
}

TEST(GaussianWhite, Deterministic) {
  EXPECT_EQ(gaussian_white(1000, 2.0, 5), gaussian_white(1000, 2.0, 5));
  EXPECT_NE(gaussian_white(1000, 2.0, 5), gaussian_white(1000, 2.0, 6));
}

TEST(ColoredNoise, ZeroMeanUnitRms) {
  for (double exponent : {-1.0, 0.0, 1.0}) {
    const auto v = colored_noise(4096, exponent, 9);
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += x * x;
    EXPECT_LT(std::abs(mean), 1e-10);
    EXPECT_NEAR(std::sqrt(ss / static_cast<double>(v.size())), 1.0, 1e-12);
  }
}

TEST(ColoredNoise, RejectsTinyLength) {
  EXPECT_THROW((void)colored_noise(4, 0.0, 1), Error);
}

class NoiseSlope : public ::testing::TestWithParam<double> {};

TEST_P(NoiseSlope, WelchSlopeMatchesExponent) {
  const double exponent = GetParam();
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto v = colored_noise(1 << 16, exponent, seed);
    const Psd psd = welch_psd(v, 1.0, 1024);
    EXPECT_NEAR(psd_slope(psd, 0.02, 0.2), exponent, 0.15) << "seed " << seed;
  }
}

INSTANTIATE_TEST_SUITE_P(Colors, NoiseSlope, ::testing::Values(-1.0, 0.0, 1.0));

TEST(AddNoise, ScalesToTargetSnrAndIsExactlyAdditive) {
  const Trajectory clean = integrate_lorenz({}, 0.005, 20.0);
  const NoiseSpec spec{0.0, 4.0, 21};
  const NoisyTrajectory n = add_noise(clean, spec);
  EXPECT_EQ(n.noisy.channel_names, clean.channel_names);
  EXPECT_EQ(n.noisy.rows(), clean.rows());
  EXPECT_EQ(n.noisy.dt, clean.dt);
  for (Eigen::Index c = 0; c < clean.values.cols(); ++c) {
    EXPECT_NEAR(rms(n.noise.values.col(c)), rms(clean.values.col(c)) / 4.0, 1e-12);
  }
  EXPECT_EQ(n.noisy.values - clean.values, n.noise.values);
}

TEST(AddNoise, ChannelRmsTwoGivesNoiseRmsHalf) {
  Matrix v(1000, 1);
  for (Eigen::Index i = 0; i < v.rows(); ++i) v(i, 0) = (i % 2 == 0) ? 2.0 : -2.0;
  const NoisyTrajectory n = add_noise(Trajectory(0.0, 1.0, v, {"s"}), {0.0, 4.0, 1});
  EXPECT_NEAR(rms(n.noise.values), 0.5, 1e-12);
}

TEST(AddNoise, IndependentStreamsPerChannel) {
  Matrix v = Matrix::Ones(512, 2);
  v.col(1) *= -1.0;
  const NoisyTrajectory n = add_noise(Trajectory(0.0, 1.0, v, {"a", "b"}), {0.0, 1.0, 3});
  EXPECT_NE(n.noise.values.col(0), n.noise.values.col(1));
}

TEST(AddNoise, ZeroRmsChannelIsDegenerate) {
  Matrix v = Matrix::Zero(100, 1);
  try {
    (void)add_noise(Trajectory(0.0, 1.0, v, {"a"}), {0.0, 1.0, 0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DegenerateSignal);
  }
}

TEST(NoiseSpec, PercentConversions) {
  EXPECT_DOUBLE_EQ(NoiseSpec::from_percent(0.25, 0.0, 0).target_snr, 400.0);
  EXPECT_NEAR(snr_to_db(400.0), 52.04, 0.01);
  EXPECT_NEAR(snr_to_db(NoiseSpec::from_percent(10.0, 0.0, 0).target_snr), 20.0, 1e-12);
  EXPECT_NEAR(db_to_snr(20.0), 10.0, 1e-12);
}

TEST(NoiseSpec, RejectsNonPositiveSnr) {
  EXPECT_THROW(NoiseSpec({0.0, 0.0, 1}).validate(), Error);
  EXPECT_THROW(NoiseSpec({NAN, 1.0, 1}).validate(), Error);
}
