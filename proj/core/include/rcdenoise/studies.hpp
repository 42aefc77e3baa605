#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "rcdenoise/config.hpp"
#include "rcdenoise/metrics.hpp"
#include "rcdenoise/pipeline.hpp"

namespace rcdenoise {

/// Validation NMSE of every stage (and optionally the EKF) for one seed.
struct StageComparisonRow {
  std::uint64_t seed = 0;
  double trained = 0.0;
  double tuned = 0.0;
  double truncated = 0.0;
  std::optional<double> ekf;
  double ekf_q = 0.0;
  std::size_t truncated_nodes = 0;
  std::size_t truncated_edges = 0;
  HyperParams tuned_phi;
  std::vector<AuditEntry> audit;
};

struct StageComparison {
  double snr = 0.0;
  std::vector<StageComparisonRow> rows;

  [[nodiscard]] double mean_log10(Stage stage) const;
  [[nodiscard]] double mean(Stage stage) const;
  [[nodiscard]] std::optional<double> mean_ekf() const;
};

/// Trained, tuned and truncated RCs (plus the Lorenz EKF when `with_ekf`)
/// fitted on one noisy recording per seed at the given SNR.
[[nodiscard]] StageComparison compare_stages(const ExperimentConfig& config, double snr, bool with_ekf);
void write_stage_comparison(const std::filesystem::path& path, const StageComparison& cmp);

struct GainMatrix {
  std::vector<double> train_snr;
  std::vector<double> test_snr;
  Matrix mean;                 // train x test, averaged over seeds
  std::vector<Matrix> per_seed;

  /// Induced infinity norm of G - G^T; requires a square grid.
  [[nodiscard]] double asymmetry() const;
};

/// One RC per (seed, train SNR) at config.gain_stage, scored on fresh noise
/// at every test SNR over the validation rows.
[[nodiscard]] GainMatrix gain_matrix(const ExperimentConfig& config);
void write_gain_matrix(const std::filesystem::path& path, const GainMatrix& g);

struct SweepResult {
  std::vector<double> sigma;
  std::vector<double> test_snr;
  Matrix mean_gain;  // sigma x snr
  std::vector<Matrix> per_seed;
  std::vector<std::vector<double>> x_maxima;  // local maxima of x(t) per sigma

  /// Grid sigma with the largest mean gain at the given test SNR column.
  [[nodiscard]] double argmax_sigma(std::size_t snr_index = 0) const;
};

/// RC trained on config.sweep.training, evaluated on Lorenz recordings at
/// every sigma in the grid and every test SNR.
[[nodiscard]] SweepResult parameter_sweep(const ExperimentConfig& config);
void write_sweep(const std::filesystem::path& gain_path, const std::filesystem::path& bifurcation_path,
                 const SweepResult& sweep);

struct ColorOutcome {
  NoiseColor color;
  std::vector<std::uint64_t> seeds;
  std::vector<double> gains;
  std::vector<std::size_t> nodes;
  std::vector<DenoisingReport> reports;
  /// Seed-averaged Welch PSDs of the first target channel on the validation rows.
  Psd noise_psd;
  Psd residual_psd;
  Psd clean_psd;
  Psd denoised_psd;

  [[nodiscard]] double mean_gain() const;
  [[nodiscard]] double sd_gain() const;
};

struct NoiseStudyResult {
  std::vector<ColorOutcome> colors;

  [[nodiscard]] const ColorOutcome& color(std::string_view name) const;
};

/// Per noise color: RC pipeline at config.noise_study.stage for every seed.
[[nodiscard]] NoiseStudyResult noise_color_study(const ExperimentConfig& config);
/// gains.csv (`color,seed,nodes,gain`), summary.csv and psd_<color>_<signal>.csv.
void write_noise_study(const std::filesystem::path& dir, const NoiseStudyResult& result);

/// Local maxima of a column after `skip` rows.
[[nodiscard]] std::vector<double> local_maxima(const Eigen::Ref<const Vector>& x, std::size_t skip);

}  // namespace rcdenoise
