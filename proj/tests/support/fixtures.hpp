#pragma once

#include <cstdint>

#include "rcdenoise/config.hpp"
#include "rcdenoise/pipeline.hpp"

namespace fixture {

/// Lorenz config shortened for unit-test runtimes.
inline rcdenoise::ExperimentConfig small_lorenz(double duration = 20.0, double train_end = 10.0) {
  auto cfg = rcdenoise::ExperimentConfig::lorenz_defaults();
  cfg.duration = duration;
  cfg.train_end = train_end;
  return cfg;
}

/// One noisy Lorenz recording with its train/validation split.
struct LorenzData {
  rcdenoise::ExperimentConfig config;
  rcdenoise::Recording recording;
  rcdenoise::Dataset data;
};

inline LorenzData lorenz_data(const rcdenoise::ExperimentConfig& cfg, double snr, std::uint64_t seed) {
  const auto sim = rcdenoise::simulate(cfg);
  const rcdenoise::NoiseSpec spec{cfg.noise_exponent, snr,
                                  rcdenoise::noise_seed(seed, "train", cfg.lorenz.sigma, snr, cfg.noise_exponent)};
  auto rec = rcdenoise::observe(cfg, sim, spec);
  auto data = rcdenoise::make_dataset(cfg, {rec});
  return {cfg, std::move(rec), std::move(data)};
}

}  // namespace fixture
