#include "rcdenoise/pipeline.hpp"

#include <chrono>

#include "rcdenoise/csv.hpp"
#include "rcdenoise/dynamics.hpp"
#include "rcdenoise/error.hpp"
#include "rcdenoise/random.hpp"

namespace rcdenoise {

Simulation simulate(const ExperimentConfig& config, std::optional<double> sigma) {
  Simulation sim;
  if (config.system == SystemKind::Lorenz) {
    LorenzParams p = config.lorenz;
    if (sigma) p.sigma = *sigma;
    sim.clean = std::make_shared<const Trajectory>(integrate_lorenz(p, config.dt, config.duration));
  } else {
    auto run = integrate_adex(config.adex, config.current, config.dt, config.duration);
    sim.clean = std::make_shared<const Trajectory>(std::move(run.trajectory));
    sim.spike_times = std::move(run.spike_times);
  }
  return sim;
}

Recording observe(const ExperimentConfig& config, const Simulation& sim, const NoiseSpec& spec) {
  Recording rec;
  rec.clean = sim.clean;
  rec.spec = spec;
  rec.targets = std::make_shared<const Trajectory>(sim.clean->select(config.targets));
  auto noisy = add_noise(sim.clean->select(config.observed), spec);
  rec.noisy = std::make_shared<const Trajectory>(std::move(noisy.noisy));
  rec.noise = std::make_shared<const Trajectory>(std::move(noisy.noise));
  return rec;
}

std::uint64_t noise_seed(std::uint64_t seed, std::string_view role, double sigma, double snr, double exponent) {
  const std::string tag = "noise/" + std::string(role) + "/sigma=" + csv::format_double(sigma) +
                          "/snr=" + csv::format_double(snr) + "/exp=" + csv::format_double(exponent);
  return derive_seed(seed, tag);
}

std::uint64_t reservoir_seed(std::uint64_t seed) { return derive_seed(seed, "reservoir"); }

Dataset make_dataset(const ExperimentConfig& config, const std::vector<Recording>& recordings) {
  require(!recordings.empty(), "make_dataset: no recordings");
  const std::size_t split = config.train_rows();
  Dataset data;
  for (const auto& r : recordings) data.train.push_back({r.noisy, r.targets, 0, split});
  const auto& first = recordings.front();
  data.validation.push_back({first.noisy, first.targets, split, first.noisy->rows()});
  data.validate();
  return data;
}

const StageResult& PipelineResult::at(Stage stage) const {
  for (const auto& s : stages)
    if (s.stage == stage) return s;
  fail(ErrorKind::Orchestration, "pipeline: stage '" + std::string(to_string(stage)) + "' was not run");
}

namespace {

double elapsed(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

EchoStateNetwork fitted(const PipelineSettings& s, const Dataset& data, const HyperParams& phi, std::uint64_t seed,
                        double& nmse_out) {
  auto esn = build_reservoir(phi, data.train.front().inputs->channels(), seed, s.reservoir);
  if (s.standardize) fit_channel_scaling(esn, data);
  nmse_out = fit_readout(esn, data, s.ridge).validation_nmse;
  return esn;
}

}  // namespace

StageResult run_stage(const PipelineSettings& settings, const Dataset& data, Stage stage, std::uint64_t seed,
                      const StageResult* previous, std::size_t jobs) {
  const auto start = std::chrono::steady_clock::now();
  const std::uint64_t rseed = reservoir_seed(seed);
  StageResult out;
  out.stage = stage;
  switch (stage) {
    case Stage::Trained:
      out.esn = fitted(settings, data, settings.baseline, rseed, out.validation_nmse);
      break;
    case Stage::Tuned: {
      ObjectiveSettings obj;
      obj.reservoir = settings.reservoir;
      obj.ridge = settings.ridge;
      obj.standardize = settings.standardize;
      obj.seeds = {rseed};
      for (std::size_t k = 1; k < settings.objective_seeds; ++k) obj.seeds.push_back(derive_seed(rseed, {k}));
      OptimizerOptions search = settings.search;
      search.jobs = jobs;
      out.search = optimize(settings.space, make_objective(data, obj), search, derive_seed(seed, "search"));
      out.esn = fitted(settings, data, out.search->best, rseed, out.validation_nmse);
      break;
    }
    case Stage::Truncated: {
      if (previous == nullptr || previous->stage != Stage::Tuned)
        fail(ErrorKind::Orchestration, "pipeline: the truncated stage needs a tuned network");
      auto pruned = truncate(previous->esn, data, settings.prune, settings.ridge);
      out.esn = std::move(pruned.esn);
      out.validation_nmse = pruned.nmse;
      out.audit = std::move(pruned.audit);
      break;
    }
  }
  out.seconds = elapsed(start);
  return out;
}

PipelineResult run_stages(const PipelineSettings& settings, const Dataset& data, Stage upto, std::uint64_t seed,
                          std::size_t jobs, bool include_trained) {
  PipelineResult result;
  if (include_trained || upto == Stage::Trained)
    result.stages.push_back(run_stage(settings, data, Stage::Trained, seed, nullptr, jobs));
  if (upto == Stage::Trained) return result;
  result.stages.push_back(run_stage(settings, data, Stage::Tuned, seed, nullptr, jobs));
  if (upto == Stage::Tuned) return result;
  const StageResult tuned = result.stages.back();
  result.stages.push_back(run_stage(settings, data, Stage::Truncated, seed, &tuned, jobs));
  return result;
}

Trajectory reconstruct(const EchoStateNetwork& esn, const Trajectory& noisy) { return predict(esn, noisy).output; }

DenoisingReport evaluate_recording(const ExperimentConfig& config, const EchoStateNetwork& esn, const Recording& test) {
  const std::size_t begin = config.train_rows();
  const std::size_t end = test.noisy->rows();
  const Trajectory recon = reconstruct(esn, *test.noisy).slice(begin, end);
  auto report = denoising_gain(test.clean->slice(begin, end), test.noisy->slice(begin, end), recon);
  report.validate();
  return report;
}

}  // namespace rcdenoise
