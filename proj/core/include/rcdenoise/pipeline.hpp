#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rcdenoise/config.hpp"
#include "rcdenoise/hyperopt.hpp"
#include "rcdenoise/metrics.hpp"
#include "rcdenoise/noise.hpp"
#include "rcdenoise/pruning.hpp"
#include "rcdenoise/readout.hpp"

namespace rcdenoise {

/// Ground truth of one simulated run. `spike_times` is empty for Lorenz.
struct Simulation {
  std::shared_ptr<const Trajectory> clean;  // every system channel
  std::vector<double> spike_times;
};

/// Integrates the configured system; `sigma` overrides the Lorenz Prandtl number.
[[nodiscard]] Simulation simulate(const ExperimentConfig& config, std::optional<double> sigma = std::nullopt);

/// Noisy observation of a simulation.
struct Recording {
  std::shared_ptr<const Trajectory> clean;    // every system channel
  std::shared_ptr<const Trajectory> targets;  // clean target channels
  std::shared_ptr<const Trajectory> noisy;    // noisy observed channels
  std::shared_ptr<const Trajectory> noise;    // noisy - clean on the observed channels
  NoiseSpec spec;
};

[[nodiscard]] Recording observe(const ExperimentConfig& config, const Simulation& sim, const NoiseSpec& spec);

/// Noise realization seeds. `role` is "train" or "test"; tags encode the
/// role, Prandtl number, SNR and exponent so every cell gets its own stream.
[[nodiscard]] std::uint64_t noise_seed(std::uint64_t seed, std::string_view role, double sigma, double snr,
                                       double exponent);
[[nodiscard]] std::uint64_t reservoir_seed(std::uint64_t seed);

/// Training rows of every recording; validation rows of the first one.
[[nodiscard]] Dataset make_dataset(const ExperimentConfig& config, const std::vector<Recording>& recordings);

struct StageResult {
  Stage stage = Stage::Trained;
  EchoStateNetwork esn;
  double validation_nmse = 0.0;
  double seconds = 0.0;
  std::optional<OptimizeResult> search;
  std::vector<AuditEntry> audit;
};

struct PipelineResult {
  std::vector<StageResult> stages;  // in order trained, tuned, truncated, up to the requested one

  [[nodiscard]] const StageResult& at(Stage stage) const;
  [[nodiscard]] const StageResult& last() const { return stages.back(); }
};

/// Runs the requested stage and every stage it depends on. `trained` fits the
/// fixed baseline; `tuned` searches phi from scratch; `truncated` prunes the
/// tuned network (nodes, then edges). The baseline is only run alongside the
/// later stages when `include_trained` is set.
[[nodiscard]] PipelineResult run_stages(const PipelineSettings& settings, const Dataset& data, Stage upto,
                                        std::uint64_t seed, std::size_t jobs = 1, bool include_trained = true);

/// A single stage given its prerequisite (`previous` is the tuned result for
/// `truncated` and ignored otherwise).
[[nodiscard]] StageResult run_stage(const PipelineSettings& settings, const Dataset& data, Stage stage,
                                    std::uint64_t seed, const StageResult* previous = nullptr, std::size_t jobs = 1);

/// Reconstruct the validation rows of `test` with `esn` and score against the
/// clean targets.
[[nodiscard]] DenoisingReport evaluate_recording(const ExperimentConfig& config, const EchoStateNetwork& esn,
                                                 const Recording& test);

/// Reconstruction of a whole recording (rows before the washout included).
[[nodiscard]] Trajectory reconstruct(const EchoStateNetwork& esn, const Trajectory& noisy);

}  // namespace rcdenoise
