#include "rcdenoise/metrics.hpp"

#include <cmath>
#include <numbers>

#include "rcdenoise/csv.hpp"
#include "rcdenoise/error.hpp"
#include "rcdenoise/fft.hpp"
#include "rcdenoise/training.hpp"

namespace rcdenoise {

namespace {

double ratio(double signal_rms, double residual_rms) {
  return residual_rms > 0.0 ? signal_rms / residual_rms : kInfiniteSnr;
}

}  // namespace

SnrResult snr_detail(const Eigen::Ref<const Matrix>& clean, const Eigen::Ref<const Matrix>& candidate) {
  require(clean.rows() == candidate.rows() && clean.cols() == candidate.cols(), "snr: shape mismatch");
  require(clean.size() > 0, "snr: empty signal");
  const double signal = rms(clean);
  if (!(signal > 0.0)) fail(ErrorKind::DegenerateSignal, "snr: clean signal has zero RMS");
  SnrResult out;
  const Matrix residual = candidate - clean;
  out.pooled = ratio(signal, rms(residual));
  for (Eigen::Index c = 0; c < clean.cols(); ++c) {
    const double s = std::sqrt(clean.col(c).squaredNorm() / static_cast<double>(clean.rows()));
    const double r = std::sqrt(residual.col(c).squaredNorm() / static_cast<double>(clean.rows()));
    out.per_channel.push_back(ratio(s, r));
  }
  return out;
}

double snr(const Eigen::Ref<const Matrix>& clean, const Eigen::Ref<const Matrix>& candidate) {
  return snr_detail(clean, candidate).pooled;
}

double snr(const Trajectory& clean, const Trajectory& candidate) {
  require_aligned(clean, candidate, "snr");
  return snr(clean.values, candidate.values);
}

double amplitude_db(double r) { return 20.0 * std::log10(r); }
double power_db(double v) { return 10.0 * std::log10(v); }

void DenoisingReport::validate() const {
  require(std::isfinite(nmse) && std::isfinite(snr_test) && std::isfinite(snr_reconstructed) &&
              std::isfinite(denoising_gain),
          "denoising report has non-finite entries");
  require(denoising_gain == snr_reconstructed / snr_test, "denoising gain must equal the SNR ratio");
}

DenoisingReport denoising_gain(const Eigen::Ref<const Matrix>& clean, const Eigen::Ref<const Matrix>& test_input,
                               const Eigen::Ref<const Matrix>& reconstruction, SnrAggregate aggregate) {
  require(clean.rows() == test_input.rows() && clean.cols() == test_input.cols() &&
              clean.rows() == reconstruction.rows() && clean.cols() == reconstruction.cols(),
          "denoising_gain: shape mismatch");
  const auto test = snr_detail(clean, test_input);
  const auto recon = snr_detail(clean, reconstruction);
  DenoisingReport rep;
  rep.snr_test_per_channel = test.per_channel;
  rep.snr_reconstructed_per_channel = recon.per_channel;
  if (aggregate == SnrAggregate::Pooled) {
    rep.snr_test = test.pooled;
    rep.snr_reconstructed = recon.pooled;
  } else {
    for (auto v : test.per_channel) rep.snr_test += v / static_cast<double>(test.per_channel.size());
    for (auto v : recon.per_channel) rep.snr_reconstructed += v / static_cast<double>(recon.per_channel.size());
  }
  rep.denoising_gain = rep.snr_reconstructed / rep.snr_test;
  rep.nmse = nmse(reconstruction, clean);
  for (Eigen::Index c = 0; c < clean.cols(); ++c)
    rep.residual_rms.push_back(
        std::sqrt((reconstruction.col(c) - clean.col(c)).squaredNorm() / static_cast<double>(clean.rows())));
  return rep;
}

DenoisingReport denoising_gain(const Trajectory& clean, const Trajectory& test_input, const Trajectory& reconstruction,
                               SnrAggregate aggregate) {
  require(clean.rows() == test_input.rows() && clean.rows() == reconstruction.rows(),
          "denoising_gain: trajectories must share the time grid");
  std::vector<std::string> shared;
  for (const auto& name : test_input.channel_names)
    if (reconstruction.has_channel(name)) shared.push_back(name);
  require(!shared.empty(), "denoising_gain: test input and reconstruction share no channel");
  const Trajectory c = clean.select(shared);
  auto rep = denoising_gain(c.values, test_input.select(shared).values, reconstruction.select(shared).values, aggregate);
  rep.channels = shared;
  // NMSE and residuals cover every reconstructed channel, including unobserved ones.
  const Trajectory full = clean.select(reconstruction.channel_names);
  rep.nmse = nmse(reconstruction.values, full.values);
  rep.residual_rms.clear();
  for (Eigen::Index k = 0; k < full.values.cols(); ++k)
    rep.residual_rms.push_back(std::sqrt((reconstruction.values.col(k) - full.values.col(k)).squaredNorm() /
                                         static_cast<double>(full.rows())));
  return rep;
}

Psd welch_psd(std::span<const double> signal, double sample_rate, std::size_t segment_length, double overlap) {
  require(sample_rate > 0.0, "welch_psd: sample rate must be positive");
  require(segment_length >= 8 && (segment_length & (segment_length - 1)) == 0,
          "welch_psd: segment length must be a power of two >= 8");
  require(overlap >= 0.0 && overlap < 1.0, "welch_psd: overlap must lie in [0, 1)");
  require(signal.size() >= segment_length, "welch_psd: signal shorter than one segment");
  const std::size_t m = segment_length;
  const auto hop = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(static_cast<double>(m) * (1.0 - overlap))));
  std::vector<double> window(m);
  double window_power = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    // Periodic Hann.
    window[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(m));
    window_power += window[i] * window[i];
  }
  const std::size_t bins = m / 2 + 1;
  std::vector<double> acc(bins, 0.0);
  std::size_t segments = 0;
  std::vector<double> buf(m);
  for (std::size_t start = 0; start + m <= signal.size(); start += hop) {
    double mean = 0.0;
    for (std::size_t i = 0; i < m; ++i) mean += signal[start + i];
    mean /= static_cast<double>(m);
    for (std::size_t i = 0; i < m; ++i) buf[i] = (signal[start + i] - mean) * window[i];
    const auto spec = fft::forward_real(buf);
    for (std::size_t k = 0; k < bins; ++k) acc[k] += std::norm(spec[k]);
    ++segments;
  }
  Psd out;
  out.freq.resize(bins);
  out.power.resize(bins);
  const double scale = 1.0 / (sample_rate * window_power * static_cast<double>(segments));
  for (std::size_t k = 0; k < bins; ++k) {
    out.freq[k] = static_cast<double>(k) * sample_rate / static_cast<double>(m);
    const bool edge = k == 0 || k == bins - 1;
    out.power[k] = acc[k] * scale * (edge ? 1.0 : 2.0);
  }
  return out;
}

double psd_slope(std::span<const double> freq, std::span<const double> power, double f_lo, double f_hi) {
  require(freq.size() == power.size(), "psd_slope: frequency and power lengths differ");
  require(f_lo < f_hi, "psd_slope: empty band");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < freq.size(); ++i) {
    if (!(freq[i] > 0.0) || freq[i] < f_lo || freq[i] > f_hi) continue;
    if (!(power[i] > 0.0)) fail(ErrorKind::DegenerateSignal, "psd_slope: PSD must be positive on the band");
    const double x = std::log10(freq[i]);
    const double y = std::log10(power[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  require(n >= 4, "psd_slope: fewer than 4 frequency points in the band");
  const double dn = static_cast<double>(n);
  const double denom = dn * sxx - sx * sx;
  return (dn * sxy - sx * sy) / denom;
}

double psd_slope(const Psd& psd, double f_lo, double f_hi) { return psd_slope(psd.freq, psd.power, f_lo, f_hi); }

double integrate_psd(const Psd& psd) {
  if (psd.freq.size() < 2) return 0.0;
  const double df = psd.freq[1] - psd.freq[0];
  double total = 0.0;
  for (auto p : psd.power) total += p;
  return total * df;
}

void write_psd(const std::filesystem::path& path, const Psd& psd) {
  csv::Table table({"f_hz", "psd_db_per_hz"});
  for (std::size_t i = 0; i < psd.freq.size(); ++i) {
    if (i == 0 && !(psd.power[i] > 0.0)) continue;
    table.add_row({csv::format_double(psd.freq[i]), csv::format_double(power_db(psd.power[i]))});
  }
  table.write(path);
}

}  // namespace rcdenoise
