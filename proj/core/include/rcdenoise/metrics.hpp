#pragma once

#include <filesystem>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "rcdenoise/trajectory.hpp"

namespace rcdenoise {

/// Returned by snr() when the candidate equals the clean signal.
inline constexpr double kInfiniteSnr = std::numeric_limits<double>::infinity();

struct SnrResult {
  double pooled = 0.0;
  std::vector<double> per_channel;
};

/// RMS(clean) / RMS(candidate - clean), pooled over channels and per channel.
[[nodiscard]] SnrResult snr_detail(const Eigen::Ref<const Matrix>& clean, const Eigen::Ref<const Matrix>& candidate);
[[nodiscard]] double snr(const Eigen::Ref<const Matrix>& clean, const Eigen::Ref<const Matrix>& candidate);
[[nodiscard]] double snr(const Trajectory& clean, const Trajectory& candidate);

[[nodiscard]] double amplitude_db(double ratio);  // 20 log10
[[nodiscard]] double power_db(double value);      // 10 log10

struct Psd {
  std::vector<double> freq;   // Hz
  std::vector<double> power;  // units^2 / Hz
};

struct PsdCurve {
  std::string label;
  Psd psd;
};

enum class SnrAggregate { Pooled, ChannelMean };

struct DenoisingReport {
  std::vector<std::string> channels;  // channels the SNRs were computed on
  double nmse = 0.0;                  // reconstruction vs clean over every reconstructed channel
  double snr_test = 0.0;
  double snr_reconstructed = 0.0;
  double denoising_gain = 0.0;
  std::vector<double> snr_test_per_channel;
  std::vector<double> snr_reconstructed_per_channel;
  std::vector<double> residual_rms;  // per reconstructed channel
  std::vector<PsdCurve> psd;

  void validate() const;
};

/// gain = SNR(clean, reconstruction) / SNR(clean, test_input), evaluated on the
/// channels shared by the test input and the reconstruction.
[[nodiscard]] DenoisingReport denoising_gain(const Trajectory& clean, const Trajectory& test_input,
                                             const Trajectory& reconstruction,
                                             SnrAggregate aggregate = SnrAggregate::Pooled);

/// Matrix form; all three must have the same shape.
[[nodiscard]] DenoisingReport denoising_gain(const Eigen::Ref<const Matrix>& clean,
                                             const Eigen::Ref<const Matrix>& test_input,
                                             const Eigen::Ref<const Matrix>& reconstruction,
                                             SnrAggregate aggregate = SnrAggregate::Pooled);

/// Hann-windowed Welch estimate, one-sided, each segment mean-removed, scaled
/// so that sum(power) * df approximates the signal variance.
[[nodiscard]] Psd welch_psd(std::span<const double> signal, double sample_rate, std::size_t segment_length = 1024,
                            double overlap = 0.5);

/// Least-squares slope of log10(power) against log10(freq) on [f_lo, f_hi].
[[nodiscard]] double psd_slope(const Psd& psd, double f_lo, double f_hi);
[[nodiscard]] double psd_slope(std::span<const double> freq, std::span<const double> power, double f_lo, double f_hi);

/// Integral of the one-sided PSD (sum(power) * df).
[[nodiscard]] double integrate_psd(const Psd& psd);

/// `f_hz,psd_db_per_hz`; the DC bin is skipped when its power is zero.
void write_psd(const std::filesystem::path& path, const Psd& psd);

}  // namespace rcdenoise
