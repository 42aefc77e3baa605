// rc_denoise: config-driven runner for the reservoir denoising experiments.

#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "rcdenoise/config.hpp"
#include "rcdenoise/error.hpp"
#include "rcdenoise/experiment.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitOther = 1;

struct Args {
  std::string config_path;
  std::string system = "lorenz";
  std::string out;
  std::optional<std::uint64_t> seed;
  std::string stage;
  std::size_t jobs = 0;
};

rcdenoise::ExperimentConfig load(const Args& a) {
  if (!a.config_path.empty()) return rcdenoise::load_config(a.config_path);
  if (a.system == "adex") return rcdenoise::ExperimentConfig::adex_defaults();
  if (a.system == "lorenz") return rcdenoise::ExperimentConfig::lorenz_defaults();
  rcdenoise::fail(rcdenoise::ErrorKind::Config, "--system must be lorenz or adex");
}

rcdenoise::CommandOptions options(const Args& a, const rcdenoise::ExperimentConfig& c, rcdenoise::Stage fallback) {
  rcdenoise::CommandOptions o;
  o.out = a.out.empty() ? c.output_dir : std::filesystem::path(a.out);
  o.seed = a.seed;
  o.stage = a.stage.empty() ? fallback : rcdenoise::parse_stage(a.stage);
  o.jobs = a.jobs;
  return o;
}

int exit_code(const rcdenoise::Error& e) {
  using rcdenoise::ErrorKind;
  if (e.kind() == ErrorKind::Config || e.kind() == ErrorKind::InvalidArgument) return kExitConfig;
  if (e.is_numeric()) return kExitNumeric;
  return kExitOther;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reservoir-computing denoising and reconstruction of nonlinear dynamics"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", rcdenoise::library_version());
  Args args;
  app.add_option("--config", args.config_path, "Experiment config (JSON)");
  app.add_option("--system", args.system, "Built-in defaults when no config is given (lorenz|adex)");
  app.add_option("--out", args.out, "Output directory (overrides the config)");
  app.add_option("--seed", args.seed, "Run only this seed");
  app.add_option("--stage", args.stage, "trained|tuned|truncated");
  app.add_option("--jobs", args.jobs, "Worker threads (0 = all cores, capped by RC_DENOISE_THREADS)");

  using Runner = std::function<rcdenoise::RunManifest(const rcdenoise::ExperimentConfig&, const rcdenoise::CommandOptions&)>;
  // How --stage applies: Fixed = set by the subcommand (a conflicting flag is
  // an error), Model = selects which saved model to use, Study = overrides the
  // configured study stage, None = ignored.
  enum class StageUse { Fixed, Model, Study, None };
  struct Command {
    const char* help;
    Runner run;
    StageUse use;
    rcdenoise::Stage stage;
  };
  using rcdenoise::Stage;
  const std::map<std::string, Command> commands{
      {"generate", {"Write clean and noisy recordings", rcdenoise::generate_dataset, StageUse::None, Stage::Trained}},
      {"train", {"Fit the fixed baseline reservoir", rcdenoise::run_pipeline, StageUse::Fixed, Stage::Trained}},
      {"tune", {"Optimize hyperparameters and fit", rcdenoise::run_pipeline, StageUse::Fixed, Stage::Tuned}},
      {"prune", {"Truncate the tuned reservoir", rcdenoise::run_pipeline, StageUse::Fixed, Stage::Truncated}},
      {"denoise", {"Apply saved models to the test recordings", rcdenoise::run_denoise, StageUse::Model, Stage::Truncated}},
      {"ekf", {"Extended Kalman filter baseline (Lorenz)", rcdenoise::run_ekf_baseline, StageUse::None, Stage::Trained}},
      {"gain-matrix", {"Denoising gain over train x test SNR", rcdenoise::run_gain_matrix, StageUse::Study, Stage::Tuned}},
      {"sweep", {"Denoising gain across the Prandtl number", rcdenoise::run_sweep, StageUse::Study, Stage::Tuned}},
      {"noise-study", {"White / violet / pink noise comparison", rcdenoise::run_noise_study, StageUse::Study, Stage::Truncated}},
      {"report", {"Summarize every report into summary.csv", rcdenoise::run_report, StageUse::None, Stage::Trained}},
  };
  std::map<std::string, CLI::App*> subs;
  for (const auto& [name, cmd] : commands) subs[name] = app.add_subcommand(name, cmd.help);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    const auto config = load(args);
    for (const auto& [name, sub] : subs) {
      if (!sub->parsed()) continue;
      const auto& cmd = commands.at(name);
      auto effective = config;
      auto opts = options(args, config, cmd.stage);
      const bool flagged = !args.stage.empty();
      switch (cmd.use) {
        case StageUse::Fixed:
          if (flagged && opts.stage != cmd.stage)
            throw rcdenoise::Error(rcdenoise::ErrorKind::Config,
                                   "--stage conflicts with '" + name + "'; use train, tune or prune");
          break;
        case StageUse::Model:
          break;
        case StageUse::Study:
          if (flagged) {
            if (name == "gain-matrix") effective.gain_stage = opts.stage;
            if (name == "sweep") effective.sweep.stage = opts.stage;
            if (name == "noise-study") effective.noise_study.stage = opts.stage;
          }
          break;
        case StageUse::None:
          break;
      }
      const auto manifest = cmd.run(effective, opts);
      if (name == "report") {
        std::ifstream summary(opts.out / "summary.csv");
        std::cout << summary.rdbuf();
      }
      std::cerr << name << ": wrote " << manifest.artifacts.size() << " artifacts under " << opts.out.string() << '\n';
    }
  } catch (const rcdenoise::Error& e) {
    std::cerr << "error [" << rcdenoise::to_string(e.kind()) << "]: " << e.what() << '\n';
    return exit_code(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitOther;
  }
  return 0;
}
