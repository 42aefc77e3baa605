#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "rcdenoise/config.hpp"

namespace rcdenoise {

[[nodiscard]] std::string library_version();

/// Record of one command invocation. Written last, after every listed
/// artifact exists.
struct RunManifest {
  std::string command;
  std::uint64_t config_hash = 0;
  std::string version;
  std::vector<std::uint64_t> seeds;
  std::vector<std::filesystem::path> artifacts;  // relative to the output directory

  void add(const std::filesystem::path& root, const std::filesystem::path& file);
  /// Throws Orchestration when an artifact is missing.
  void write(const std::filesystem::path& root) const;
};

/// File layout under an output directory.
struct ArtifactPaths {
  std::filesystem::path root;

  [[nodiscard]] std::filesystem::path clean() const;
  [[nodiscard]] std::filesystem::path spikes() const;
  [[nodiscard]] std::filesystem::path noisy(std::string_view role, double snr, std::uint64_t seed) const;
  [[nodiscard]] std::filesystem::path noise(std::string_view role, double snr, std::uint64_t seed) const;
  [[nodiscard]] std::filesystem::path model(Stage stage, double snr, std::uint64_t seed) const;
  [[nodiscard]] std::filesystem::path report(std::string_view name, double snr, std::uint64_t seed) const;
  [[nodiscard]] std::filesystem::path history(double snr, std::uint64_t seed) const;
  [[nodiscard]] std::filesystem::path audit(double snr, std::uint64_t seed) const;
  [[nodiscard]] std::filesystem::path ekf_estimates(double snr, std::uint64_t seed) const;
  [[nodiscard]] std::filesystem::path denoised(Stage stage, double train_snr, double test_snr, std::uint64_t seed) const;
  [[nodiscard]] std::filesystem::path manifest(std::string_view command) const;
};

struct CommandOptions {
  std::filesystem::path out;
  std::optional<std::uint64_t> seed;  // restricts the config's seed list
  Stage stage = Stage::Tuned;
  std::size_t jobs = 1;
};

/// Clean recording plus noisy observations for every (role, SNR, seed).
RunManifest generate_dataset(const ExperimentConfig& config, const CommandOptions& options);

/// Fits `stage` for every (train SNR, seed) from generated files. Missing
/// datasets or a missing tuned model (for `truncated`) raise Orchestration.
RunManifest run_pipeline(const ExperimentConfig& config, const CommandOptions& options);

/// Applies saved models of `options.stage` to every generated test recording.
RunManifest run_denoise(const ExperimentConfig& config, const CommandOptions& options);

RunManifest run_ekf_baseline(const ExperimentConfig& config, const CommandOptions& options);
RunManifest run_gain_matrix(const ExperimentConfig& config, const CommandOptions& options);
RunManifest run_sweep(const ExperimentConfig& config, const CommandOptions& options);
RunManifest run_noise_study(const ExperimentConfig& config, const CommandOptions& options);

/// Collects every JSON report under the output directory into summary.csv.
RunManifest run_report(const ExperimentConfig& config, const CommandOptions& options);

/// The config with `options.seed` (if any) as its only seed and `jobs` applied.
[[nodiscard]] ExperimentConfig effective_config(const ExperimentConfig& config, const CommandOptions& options);

}  // namespace rcdenoise
