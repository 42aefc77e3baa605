#include "rcdenoise/noise.hpp"

#include <cmath>
#include <complex>

#include "rcdenoise/error.hpp"
#include "rcdenoise/fft.hpp"
#include "rcdenoise/random.hpp"

namespace rcdenoise {

void NoiseSpec::validate() const {
  require(std::isfinite(exponent), "noise exponent must be finite");
  require(std::isfinite(target_snr) && target_snr > 0.0, "target SNR must be positive");
}

NoiseSpec NoiseSpec::from_percent(double percent_of_rms, double exponent, std::uint64_t seed) {
  require(percent_of_rms > 0.0, "noise percentage must be positive");
  return NoiseSpec{exponent, 100.0 / percent_of_rms, seed};
}

double snr_to_db(double snr) { return 20.0 * std::log10(snr); }
double db_to_snr(double db) { return std::pow(10.0, db / 20.0); }

std::vector<double> gaussian_white(std::size_t n, double sigma, std::uint64_t seed) {
  require(n >= 1, "gaussian_white: n must be at least 1");
  require(sigma >= 0.0, "gaussian_white: sigma must be non-negative");
  std::vector<double> out(n, 0.0);
  if (sigma == 0.0) return out;
  Rng rng(seed);
  for (double& v : out) v = rng.normal(0.0, sigma);
  return out;
}

std::vector<double> colored_noise(std::size_t n, double exponent, std::uint64_t seed) {
  require(n >= 8, "colored_noise: need at least 8 samples");
  require(std::isfinite(exponent), "colored_noise: exponent must be finite");
  const auto white = gaussian_white(n, 1.0, seed);
  auto spectrum = fft::forward_real(white);
  spectrum[0] = 0.0;
  const double half = exponent / 2.0;
  for (std::size_t k = 1; k < spectrum.size(); ++k) {
    const double f = static_cast<double>(k) / static_cast<double>(n);
    spectrum[k] *= std::pow(f, half);
  }
  auto out = fft::inverse_real(spectrum, n);

  double mean = 0.0;
  for (double v : out) mean += v;
  mean /= static_cast<double>(n);
  double sq = 0.0;
  for (double& v : out) {
    v -= mean;
    sq += v * v;
  }
  const double r = std::sqrt(sq / static_cast<double>(n));
  if (!(r > 0.0)) fail(ErrorKind::DegenerateSignal, "colored_noise: shaped spectrum vanished");
  for (double& v : out) v /= r;
  return out;
}

NoisyTrajectory add_noise(const Trajectory& clean, const NoiseSpec& spec) {
  spec.validate();
  require(!clean.empty(), "add_noise: empty trajectory");
  NoisyTrajectory out{clean, clean};
  for (std::size_t c = 0; c < clean.channels(); ++c) {
    const auto col = static_cast<Eigen::Index>(c);
    const double signal_rms = rms(clean.values.col(col));
    if (!(signal_rms > 0.0))
      fail(ErrorKind::DegenerateSignal, "add_noise: channel '" + clean.channel_names[c] + "' has zero RMS");
    const auto unit = colored_noise(clean.rows(), spec.exponent, derive_seed(spec.seed, {c}));
    const double scale = signal_rms / spec.target_snr;
    for (Eigen::Index i = 0; i < clean.values.rows(); ++i) {
      const double n = scale * unit[static_cast<std::size_t>(i)];
      out.noise.values(i, col) = n;
      out.noisy.values(i, col) = clean.values(i, col) + n;
    }
  }
  // Report the realization as actually applied, so noisy - clean == noise holds bitwise.
  out.noise.values = out.noisy.values - clean.values;
  return out;
}

}  // namespace rcdenoise
