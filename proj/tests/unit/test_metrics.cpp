#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "rcdenoise/error.hpp"
#include "rcdenoise/metrics.hpp"
#include "rcdenoise/noise.hpp"

using namespace rcdenoise;

namespace {

Matrix sine(Eigen::Index n, double amp, double f, double fs) {
  Matrix m(n, 1);
  for (Eigen::Index i = 0; i < n; ++i) m(i, 0) = amp * std::sin(2.0 * std::numbers::pi * f * static_cast<double>(i) / fs);
  return m;
}

}  // namespace

TEST(Snr, Definitions) {
  const Matrix clean = sine(1000, 2.0 * std::sqrt(2.0), 5.0, 1000.0);  // RMS 2
  EXPECT_NEAR(snr(clean, clean * 2.0), 1.0, 1e-12);
  EXPECT_NEAR(amplitude_db(snr(clean, clean * 2.0)), 0.0, 1e-10);
  EXPECT_NEAR(snr(clean, clean + Matrix::Constant(1000, 1, 0.5)), 4.0, 1e-12);
  EXPECT_NEAR(snr(clean, clean * 1.0025), 400.0, 1e-6);
  EXPECT_NEAR(amplitude_db(400.0), 52.04, 0.01);
  EXPECT_EQ(snr(clean, clean), kInfiniteSnr);
}

TEST(Snr, PooledAndPerChannel) {
  Matrix clean(4, 2), cand(4, 2);
  clean << 1, 2, -1, -2, 1, 2, -1, -2;
  cand = clean;
  cand.col(0).array() += 0.5;
  cand.col(1).array() += 1.0;
  const auto s = snr_detail(clean, cand);
  EXPECT_NEAR(s.per_channel[0], 2.0, 1e-12);
  EXPECT_NEAR(s.per_channel[1], 2.0, 1e-12);
  EXPECT_NEAR(s.pooled, std::sqrt(2.5) / std::sqrt(0.625), 1e-12);
}

TEST(Snr, ScaleEquivariant) {
  const Matrix clean = Matrix::Random(200, 3);
  const Matrix cand = clean + 0.1 * Matrix::Random(200, 3);
  EXPECT_NEAR(snr(clean * 7.5, cand * 7.5), snr(clean, cand), 1e-10);
}

TEST(Snr, DegenerateCleanSignal) {
  EXPECT_THROW((void)snr(Matrix::Zero(10, 1), Matrix::Ones(10, 1)), Error);
}

TEST(Gain, IdentityReconstructionIsUnity) {
  const Matrix clean = Matrix::Random(300, 2);
  const Matrix noisy = clean + 0.3 * Matrix::Random(300, 2);
  const auto r = denoising_gain(clean, noisy, noisy);
  EXPECT_DOUBLE_EQ(r.denoising_gain, 1.0);
  EXPECT_EQ(r.denoising_gain, r.snr_reconstructed / r.snr_test);
  EXPECT_NO_THROW(r.validate());
}

TEST(Gain, RatioOfSnrs) {
  const Matrix clean = sine(1000, std::sqrt(2.0), 3.0, 1000.0);
  const Matrix test = clean + Matrix::Constant(1000, 1, 0.25);   // SNR 4
  const Matrix recon = clean + Matrix::Constant(1000, 1, 0.125);  // SNR 8
  EXPECT_NEAR(denoising_gain(clean, test, recon).denoising_gain, 2.0, 1e-10);
}

TEST(Gain, SharedChannelsOnTrajectories) {
  Matrix c(100, 3);
  c.setRandom();
  const Trajectory clean(0.0, 1.0, c, {"x", "y", "z"});
  const Trajectory test(0.0, 1.0, c.leftCols(2) + 0.2 * Matrix::Random(100, 2), {"x", "y"});
  const Trajectory recon(0.0, 1.0, c + 0.05 * Matrix::Random(100, 3), {"x", "y", "z"});
  const auto r = denoising_gain(clean, test, recon);
  EXPECT_EQ(r.channels, (std::vector<std::string>{"x", "y"}));
  EXPECT_EQ(r.residual_rms.size(), 3u);
  EXPECT_EQ(r.snr_test_per_channel.size(), 2u);
  EXPECT_GT(r.denoising_gain, 1.0);
}

TEST(Welch, ZeroSignal) {
  const std::vector<double> z(4096, 0.0);
  for (double p : welch_psd(z, 1.0, 256).power) EXPECT_EQ(p, 0.0);
}

TEST(Welch, ParsevalForWhiteNoise) {
  const auto w = gaussian_white(1 << 16, 1.0, 4);
  const Psd psd = welch_psd(w, 100.0);
  EXPECT_NEAR(integrate_psd(psd), 1.0, 0.05);
  for (double p : psd.power) EXPECT_GE(p, 0.0);
  EXPECT_DOUBLE_EQ(psd.freq[1] - psd.freq[0], 100.0 / 1024.0);
}

TEST(Welch, ParsevalForPureTone) {
  const double amp = 3.0;
  const Matrix s = sine(1 << 15, amp, 37.0, 1000.0);
  const Psd psd = welch_psd(std::span<const double>(s.data(), static_cast<std::size_t>(s.size())), 1000.0);
  EXPECT_NEAR(integrate_psd(psd), amp * amp / 2.0, 0.05 * amp * amp / 2.0);
}

TEST(Welch, TooShortSignal) {
  const std::vector<double> v(100, 1.0);
  EXPECT_THROW((void)welch_psd(v, 1.0, 1024), Error);
}

TEST(PsdSlope, ExactLines) {
  std::vector<double> f, flat, lin;
  for (int i = 1; i <= 50; ++i) {
    f.push_back(i);
    flat.push_back(3.0);
    lin.push_back(i);
  }
  EXPECT_NEAR(psd_slope(f, flat, 1, 50), 0.0, 1e-12);
  EXPECT_NEAR(psd_slope(f, lin, 1, 50), 1.0, 1e-12);
  EXPECT_THROW((void)psd_slope(f, lin, 1, 3), Error);
}

TEST(PsdSlope, PinkGenerator) {
  const auto v = colored_noise(1 << 16, -1.0, 12);
  EXPECT_NEAR(psd_slope(welch_psd(v, 1.0), 0.01, 0.1), -1.0, 0.15);
}
