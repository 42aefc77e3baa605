#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "rcdenoise/dynamics.hpp"
#include "rcdenoise/hyperopt.hpp"
#include "rcdenoise/pruning.hpp"
#include "rcdenoise/reservoir.hpp"
#include "rcdenoise/training.hpp"

namespace rcdenoise {

enum class SystemKind { Lorenz, Adex };
enum class Stage { Trained, Tuned, Truncated };

[[nodiscard]] std::string_view to_string(SystemKind kind) noexcept;
[[nodiscard]] std::string_view to_string(Stage stage) noexcept;
[[nodiscard]] Stage parse_stage(std::string_view text);

struct PipelineSettings {
  /// Fixed reservoir of the `trained` stage; its N is also kept by `tuned`
  /// unless `space.n_nodes` spans a range.
  HyperParams baseline{500, 1.0, 0.9, 1.0, 0.3};
  ReservoirOptions reservoir{0.0, 1.0, 1.0, 100};
  bool standardize = true;
  RidgeConfig ridge;
  SearchSpace space = SearchSpace::with_fixed_nodes(500);
  OptimizerOptions search;
  PruneConfig prune;
  /// Reservoir draws averaged inside each objective evaluation.
  std::size_t objective_seeds = 1;
};

struct TrainingSet {
  double sigma = 10.0;
  double snr = 4.0;
};

struct SweepSettings {
  std::vector<double> sigma_grid;  // default 0..20 step 0.5
  /// Training recordings; the first defines the validation segment.
  std::vector<TrainingSet> training{{10.0, 4.0}};
  Stage stage = Stage::Tuned;
  /// Rows discarded before collecting local maxima of x for the bifurcation panel.
  double transient = 25.0;
};

struct NoiseColor {
  std::string name;
  double exponent = 0.0;
};

struct NoiseStudySettings {
  std::vector<NoiseColor> colors{{"violet", 1.0}, {"white", 0.0}, {"pink", -1.0}};
  double noise_percent = 10.0;
  Stage stage = Stage::Truncated;
  std::size_t welch_segment = 1024;
};

struct ExperimentConfig {
  SystemKind system = SystemKind::Lorenz;
  LorenzParams lorenz;
  AdExParams adex;
  CurrentProfile current;
  double dt = 0.005;
  double duration = 50.0;
  double train_end = 25.0;
  std::vector<std::string> observed{"x", "y"};
  std::vector<std::string> targets{"x", "y", "z"};
  double noise_exponent = 0.0;
  std::vector<double> train_snr{4.0};
  std::vector<double> test_snr{4.0};
  Stage gain_stage = Stage::Tuned;
  PipelineSettings pipeline;
  std::vector<double> ekf_q_grid;
  SweepSettings sweep;
  NoiseStudySettings noise_study;
  std::vector<std::uint64_t> seeds{0};
  std::filesystem::path output_dir = "results";
  std::size_t jobs = 1;

  [[nodiscard]] static ExperimentConfig lorenz_defaults();
  [[nodiscard]] static ExperimentConfig adex_defaults();

  [[nodiscard]] std::vector<std::string> system_channels() const;
  [[nodiscard]] std::size_t rows() const;        // samples in one recording
  [[nodiscard]] std::size_t train_rows() const;  // rows with t < train_end
  /// Samples per second of the time unit (Lorenz: s, AdEx: ms -> Hz).
  [[nodiscard]] double sample_rate_hz() const;
  /// Throws Config errors.
  void validate() const;
};

/// Starts from the defaults of the named system and applies every key present.
/// Unknown keys are rejected.
[[nodiscard]] ExperimentConfig config_from_json(const std::string& text);
[[nodiscard]] ExperimentConfig load_config(const std::filesystem::path& path);
[[nodiscard]] std::string config_to_json(const ExperimentConfig& config);
/// FNV-1a of the canonical JSON form.
[[nodiscard]] std::uint64_t config_hash(const ExperimentConfig& config);

}  // namespace rcdenoise
