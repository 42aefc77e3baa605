#pragma once

#include <cstdint>
#include <vector>

#include "rcdenoise/trajectory.hpp"

namespace rcdenoise {

/// Additive noise description. PSD is proportional to f^exponent
/// (0 white, +1 violet, -1 pink); SNR is an RMS amplitude ratio.
struct NoiseSpec {
  double exponent = 0.0;
  double target_snr = 1.0;
  std::uint64_t seed = 0;

  void validate() const;

  /// Noise RMS given as a percentage of the signal RMS, e.g. 10 -> SNR 10.
  [[nodiscard]] static NoiseSpec from_percent(double percent_of_rms, double exponent, std::uint64_t seed);
};

[[nodiscard]] double snr_to_db(double snr);
[[nodiscard]] double db_to_snr(double db);

/// i.i.d. N(0, sigma^2) samples, reproducible per seed.
[[nodiscard]] std::vector<double> gaussian_white(std::size_t n, double sigma, std::uint64_t seed);

/// Power-law noise by spectral shaping of a white spectrum; zero DC, unit RMS.
[[nodiscard]] std::vector<double> colored_noise(std::size_t n, double exponent, std::uint64_t seed);

struct NoisyTrajectory {
  Trajectory noisy;
  Trajectory noise;  // exactly noisy - clean
};

/// Independent noise stream per channel, each scaled to RMS(channel)/target_snr.
[[nodiscard]] NoisyTrajectory add_noise(const Trajectory& clean, const NoiseSpec& spec);

}  // namespace rcdenoise
