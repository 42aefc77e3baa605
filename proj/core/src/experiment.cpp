#include "rcdenoise/experiment.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "rcdenoise/csv.hpp"
#include "rcdenoise/ekf.hpp"
#include "rcdenoise/error.hpp"
#include "rcdenoise/model_io.hpp"
#include "rcdenoise/parallel.hpp"
#include "rcdenoise/pipeline.hpp"
#include "rcdenoise/studies.hpp"

#ifndef RCDENOISE_VERSION
#define RCDENOISE_VERSION "0.0.0"
#endif

namespace rcdenoise {

namespace fs = std::filesystem;
using nlohmann::json;

std::string library_version() { return RCDENOISE_VERSION; }

void RunManifest::add(const fs::path& root, const fs::path& file) { artifacts.push_back(fs::relative(file, root)); }

void RunManifest::write(const fs::path& root) const {
  json a = json::array();
  for (const auto& p : artifacts) {
    if (!fs::exists(root / p)) fail(ErrorKind::Orchestration, "manifest: artifact " + (root / p).string() + " is missing");
    a.push_back(p.generic_string());
  }
  std::ostringstream hash;
  hash << std::hex << config_hash;
  const json j = {{"command", command}, {"config_hash", hash.str()}, {"version", version}, {"seeds", seeds},
                  {"artifacts", a}};
  const ArtifactPaths paths{root};
  const auto path = paths.manifest(command);
  fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) fail(ErrorKind::Io, "cannot write " + path.string());
  out << j.dump(2) << '\n';
}

namespace {

std::string num(double v) { return csv::format_double(v); }

std::string cell(double snr, std::uint64_t seed) { return "snr=" + num(snr) + "_seed=" + std::to_string(seed); }

}  // namespace

fs::path ArtifactPaths::clean() const { return root / "data" / "clean.csv"; }
fs::path ArtifactPaths::spikes() const { return root / "data" / "spikes.csv"; }
fs::path ArtifactPaths::noisy(std::string_view role, double snr, std::uint64_t seed) const {
  return root / "data" / (std::string(role) + "_" + cell(snr, seed) + ".csv");
}
fs::path ArtifactPaths::noise(std::string_view role, double snr, std::uint64_t seed) const {
  return root / "data" / (std::string(role) + "_" + cell(snr, seed) + "_noise.csv");
}
fs::path ArtifactPaths::model(Stage stage, double snr, std::uint64_t seed) const {
  return root / "models" / (std::string(to_string(stage)) + "_" + cell(snr, seed) + ".json");
}
fs::path ArtifactPaths::report(std::string_view name, double snr, std::uint64_t seed) const {
  return root / "reports" / (std::string(name) + "_" + cell(snr, seed) + ".json");
}
fs::path ArtifactPaths::history(double snr, std::uint64_t seed) const {
  return root / "search" / ("history_" + cell(snr, seed) + ".csv");
}
fs::path ArtifactPaths::audit(double snr, std::uint64_t seed) const {
  return root / "prune" / ("audit_" + cell(snr, seed) + ".csv");
}
fs::path ArtifactPaths::ekf_estimates(double snr, std::uint64_t seed) const {
  return root / "ekf" / ("estimates_" + cell(snr, seed) + ".csv");
}
fs::path ArtifactPaths::denoised(Stage stage, double train_snr, double test_snr, std::uint64_t seed) const {
  return root / "denoise" /
         (std::string(to_string(stage)) + "_train=" + num(train_snr) + "_test=" + num(test_snr) + "_seed=" +
          std::to_string(seed) + ".csv");
}
fs::path ArtifactPaths::manifest(std::string_view command) const {
  return root / ("manifest_" + std::string(command) + ".json");
}

ExperimentConfig effective_config(const ExperimentConfig& config, const CommandOptions& options) {
  ExperimentConfig c = config;
  if (options.seed) c.seeds = {*options.seed};
  if (options.jobs > 0) c.jobs = options.jobs;
  c.validate();
  return c;
}

namespace {

RunManifest start(const ExperimentConfig& c, std::string command) {
  RunManifest m;
  m.command = std::move(command);
  m.config_hash = config_hash(c);
  m.version = library_version();
  m.seeds = c.seeds;
  return m;
}

void write_json(const fs::path& path, const json& j) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) fail(ErrorKind::Io, "cannot write " + path.string());
  out << j.dump(2) << '\n';
  if (!out) fail(ErrorKind::Io, "failed writing " + path.string());
}

void write_text(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) fail(ErrorKind::Io, "cannot write " + path.string());
  out << text;
}

Trajectory require_trajectory(const fs::path& path) {
  if (!fs::exists(path))
    fail(ErrorKind::Orchestration, "missing dataset " + path.string() + " (run `generate` first)");
  return csv::read_trajectory(path);
}

Recording load_recording(const ExperimentConfig& c, const ArtifactPaths& paths, std::string_view role, double snr,
                         std::uint64_t seed) {
  Recording rec;
  const auto clean = std::make_shared<const Trajectory>(require_trajectory(paths.clean()));
  rec.clean = clean;
  rec.targets = std::make_shared<const Trajectory>(clean->select(c.targets));
  rec.noisy = std::make_shared<const Trajectory>(require_trajectory(paths.noisy(role, snr, seed)));
  rec.noise = std::make_shared<const Trajectory>(require_trajectory(paths.noise(role, snr, seed)));
  rec.spec = {c.noise_exponent, snr, seed};
  if (rec.noisy->rows() != clean->rows())
    fail(ErrorKind::Orchestration, "dataset " + paths.noisy(role, snr, seed).string() + " does not match clean.csv");
  return rec;
}

json report_json(const DenoisingReport& r) {
  return {{"channels", r.channels},
          {"nmse", r.nmse},
          {"snr_test", r.snr_test},
          {"snr_reconstructed", r.snr_reconstructed},
          {"denoising_gain", r.denoising_gain},
          {"snr_test_per_channel", r.snr_test_per_channel},
          {"snr_reconstructed_per_channel", r.snr_reconstructed_per_channel},
          {"residual_rms", r.residual_rms}};
}

json phi_json(const HyperParams& h) {
  return {{"n_nodes", h.n_nodes},
          {"leakage", h.leakage},
          {"spectral_radius", h.spectral_radius},
          {"input_scaling", h.input_scaling},
          {"connectivity", h.connectivity}};
}

struct Cell {
  double snr;
  std::uint64_t seed;
};

std::vector<Cell> cells(const std::vector<double>& snrs, const std::vector<std::uint64_t>& seeds) {
  std::vector<Cell> out;
  for (double s : snrs)
    for (auto k : seeds) out.push_back({s, k});
  return out;
}

std::string gnuplot_header(const std::string& output) {
  return "set datafile separator ','\nset terminal pngcairo size 900,600\nset output '" + output + "'\n";
}

}  // namespace

RunManifest generate_dataset(const ExperimentConfig& config, const CommandOptions& options) {
  const auto c = effective_config(config, options);
  const ArtifactPaths paths{options.out};
  auto m = start(c, "generate");
  const Simulation sim = simulate(c);
  csv::write_trajectory(paths.clean(), *sim.clean);
  m.add(paths.root, paths.clean());
  if (c.system == SystemKind::Adex) {
    csv::write_event_times(paths.spikes(), sim.spike_times);
    m.add(paths.root, paths.spikes());
  }
  const double sigma = c.lorenz.sigma;
  for (std::string_view role : {std::string_view("train"), std::string_view("test")}) {
    const auto& grid = role == "train" ? c.train_snr : c.test_snr;
    for (const auto& [snr, seed] : cells(grid, c.seeds)) {
      const Recording rec =
          observe(c, sim, {c.noise_exponent, snr, noise_seed(seed, role, sigma, snr, c.noise_exponent)});
      csv::write_trajectory(paths.noisy(role, snr, seed), *rec.noisy);
      csv::write_trajectory(paths.noise(role, snr, seed), *rec.noise);
      m.add(paths.root, paths.noisy(role, snr, seed));
      m.add(paths.root, paths.noise(role, snr, seed));
    }
  }
  m.write(paths.root);
  return m;
}

RunManifest run_pipeline(const ExperimentConfig& config, const CommandOptions& options) {
  const auto c = effective_config(config, options);
  const ArtifactPaths paths{options.out};
  auto m = start(c, std::string(to_string(options.stage)));
  const auto todo = cells(c.train_snr, c.seeds);
  // Check every prerequisite before doing any work.
  for (const auto& [snr, seed] : todo) {
    for (const auto& p : {paths.clean(), paths.noisy("train", snr, seed), paths.noise("train", snr, seed)})
      if (!fs::exists(p)) fail(ErrorKind::Orchestration, "missing dataset " + p.string() + " (run `generate` first)");
    if (options.stage == Stage::Truncated && !fs::exists(paths.model(Stage::Tuned, snr, seed)))
      fail(ErrorKind::Orchestration,
           "missing tuned model " + paths.model(Stage::Tuned, snr, seed).string() + " (run `tune` first)");
  }
  std::vector<std::vector<fs::path>> written(todo.size());
  parallel_for(todo.size(), resolve_jobs(c.jobs), [&](std::size_t i) {
    const auto [snr, seed] = todo[i];
    const Recording rec = load_recording(c, paths, "train", snr, seed);
    const Dataset data = make_dataset(c, {rec});
    StageResult result;
    if (options.stage == Stage::Truncated) {
      StageResult tuned;
      tuned.stage = Stage::Tuned;
      tuned.esn = load_model(paths.model(Stage::Tuned, snr, seed));
      result = run_stage(c.pipeline, data, Stage::Truncated, seed, &tuned);
      write_audit(paths.audit(snr, seed), result.audit);
      written[i].push_back(paths.audit(snr, seed));
    } else {
      result = run_stage(c.pipeline, data, options.stage, seed);
      if (result.search) {
        write_history(paths.history(snr, seed), result.search->history);
        written[i].push_back(paths.history(snr, seed));
      }
    }
    save_model(paths.model(options.stage, snr, seed), result.esn);
    written[i].push_back(paths.model(options.stage, snr, seed));
    const auto report = evaluate_recording(c, result.esn, rec);
    json j = {{"kind", "rc"},
              {"stage", std::string(to_string(options.stage))},
              {"seed", seed},
              {"snr", snr},
              {"validation_nmse", result.validation_nmse},
              {"phi", phi_json(result.esn.hyper)},
              {"lambda", result.esn.ridge_lambda},
              {"nodes", result.esn.n_nodes()},
              {"edges", result.esn.edge_count()},
              {"seconds", result.seconds},
              {"report", report_json(report)}};
    const auto rp = paths.report(to_string(options.stage), snr, seed);
    write_json(rp, j);
    written[i].push_back(rp);
  });
  for (const auto& w : written)
    for (const auto& p : w) m.add(paths.root, p);
  m.write(paths.root);
  return m;
}

RunManifest run_denoise(const ExperimentConfig& config, const CommandOptions& options) {
  const auto c = effective_config(config, options);
  const ArtifactPaths paths{options.out};
  auto m = start(c, "denoise");
  for (const auto& [s_train, seed] : cells(c.train_snr, c.seeds)) {
    const auto mp = paths.model(options.stage, s_train, seed);
    if (!fs::exists(mp)) fail(ErrorKind::Orchestration, "missing model " + mp.string());
    const auto esn = load_model(mp);
    for (double s_test : c.test_snr) {
      const Recording test = load_recording(c, paths, "test", s_test, seed);
      const Trajectory recon = reconstruct(esn, *test.noisy);
      const auto out = paths.denoised(options.stage, s_train, s_test, seed);
      csv::write_trajectory(out, recon);
      m.add(paths.root, out);
      const auto report = evaluate_recording(c, esn, test);
      const std::string name = "denoise_" + std::string(to_string(options.stage)) + "_test=" + num(s_test);
      const auto rp = paths.report(name, s_train, seed);
      write_json(rp, {{"kind", "denoise"},
                      {"stage", std::string(to_string(options.stage))},
                      {"seed", seed},
                      {"snr", s_train},
                      {"test_snr", s_test},
                      {"validation_nmse", report.nmse},
                      {"report", report_json(report)}});
      m.add(paths.root, rp);
    }
  }
  m.write(paths.root);
  return m;
}

RunManifest run_ekf_baseline(const ExperimentConfig& config, const CommandOptions& options) {
  const auto c = effective_config(config, options);
  if (c.system != SystemKind::Lorenz) fail(ErrorKind::Config, "the EKF baseline is only defined for Lorenz");
  const ArtifactPaths paths{options.out};
  auto m = start(c, "ekf");
  for (const auto& [snr, seed] : cells(c.train_snr, c.seeds)) {
    const Recording rec = load_recording(c, paths, "train", snr, seed);
    const Trajectory obs_clean = rec.clean->select(c.observed);
    Vector variance(static_cast<Eigen::Index>(c.observed.size()));
    for (Eigen::Index k = 0; k < variance.size(); ++k) {
      const double a = rms(obs_clean.values.col(k)) / snr;
      variance[k] = a * a;
    }
    const auto tuning =
        tune_lorenz_ekf(c.lorenz, *rec.noisy, *rec.clean, variance, c.train_rows(), rec.clean->rows(), c.ekf_q_grid);
    write_estimates(paths.ekf_estimates(snr, seed), tuning.run);
    m.add(paths.root, paths.ekf_estimates(snr, seed));
    const std::size_t b = c.train_rows();
    const std::size_t e = rec.clean->rows();
    const auto report = denoising_gain(rec.clean->slice(b, e), rec.noisy->slice(b, e), tuning.run.estimates.slice(b, e));
    const auto rp = paths.report("ekf", snr, seed);
    write_json(rp, {{"kind", "ekf"},
                    {"stage", "ekf"},
                    {"seed", seed},
                    {"snr", snr},
                    {"q", tuning.q},
                    {"q_grid", tuning.grid},
                    {"q_grid_nmse", tuning.grid_nmse},
                    {"validation_nmse", tuning.nmse},
                    {"report", report_json(report)}});
    m.add(paths.root, rp);
  }
  m.write(paths.root);
  return m;
}

RunManifest run_gain_matrix(const ExperimentConfig& config, const CommandOptions& options) {
  const auto c = effective_config(config, options);
  const ArtifactPaths paths{options.out};
  auto m = start(c, "gain-matrix");
  const auto g = gain_matrix(c);
  const auto dir = paths.root / "gain_matrix";
  write_gain_matrix(dir / "gain_matrix.csv", g);
  csv::Table lng({"train_snr", "test_snr", "gain"});
  for (std::size_t i = 0; i < g.train_snr.size(); ++i)
    for (std::size_t j = 0; j < g.test_snr.size(); ++j)
      lng.add_row({num(g.train_snr[i]), num(g.test_snr[j]),
                   num(g.mean(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)))});
  lng.write(dir / "gain_matrix_long.csv");
  write_text(dir / "gain_matrix.gp", gnuplot_header("gain_matrix.png") +
                                         "set xlabel 'test SNR'\nset ylabel 'train SNR'\nset logscale xy\n"
                                         "set view map\nsplot 'gain_matrix_long.csv' every ::1 using 2:1:3 "
                                         "with points pointtype 5 pointsize 4 palette notitle\n");
  for (const auto& f : {"gain_matrix.csv", "gain_matrix_long.csv", "gain_matrix.gp"}) m.add(paths.root, dir / f);
  m.write(paths.root);
  return m;
}

RunManifest run_sweep(const ExperimentConfig& config, const CommandOptions& options) {
  const auto c = effective_config(config, options);
  const ArtifactPaths paths{options.out};
  auto m = start(c, "sweep");
  const auto s = parameter_sweep(c);
  const auto dir = paths.root / "sweep";
  write_sweep(dir / "gain_vs_sigma.csv", dir / "bifurcation.csv", s);
  write_text(dir / "sweep.gp", gnuplot_header("sweep.png") +
                                   "set multiplot layout 2,1\nset xlabel 'sigma'\nset ylabel 'denoising gain'\n"
                                   "plot 'gain_vs_sigma.csv' every ::1 using 1:3 with linespoints notitle\n"
                                   "set ylabel 'max x(t)'\n"
                                   "plot 'bifurcation.csv' every ::1 using 1:2 with dots notitle\n"
                                   "unset multiplot\n");
  for (const auto& f : {"gain_vs_sigma.csv", "bifurcation.csv", "sweep.gp"}) m.add(paths.root, dir / f);
  m.write(paths.root);
  return m;
}

RunManifest run_noise_study(const ExperimentConfig& config, const CommandOptions& options) {
  const auto c = effective_config(config, options);
  const ArtifactPaths paths{options.out};
  auto m = start(c, "noise-study");
  const auto result = noise_color_study(c);
  const auto dir = paths.root / "noise_study";
  write_noise_study(dir, result);
  std::string plot = gnuplot_header("noise_study.png") +
                     "set logscale x\nset xlabel 'f [Hz]'\nset ylabel 'PSD [dB/Hz]'\n"
                     "set multiplot layout " + std::to_string(result.colors.size()) + ",1\n";
  for (const auto& col : result.colors) {
    plot += "set title '" + col.color.name + "'\n";
    plot += "plot 'psd_" + col.color.name + "_noise.csv' every ::1 with lines title 'noise', 'psd_" +
            col.color.name + "_residual.csv' every ::1 with lines title 'residual'\n";
  }
  plot += "unset multiplot\n";
  write_text(dir / "noise_study.gp", plot);
  m.add(paths.root, dir / "gains.csv");
  m.add(paths.root, dir / "summary.csv");
  m.add(paths.root, dir / "noise_study.gp");
  for (const auto& col : result.colors)
    for (const auto* kind : {"noise", "residual", "clean", "denoised"})
      m.add(paths.root, dir / ("psd_" + col.color.name + "_" + kind + ".csv"));
  m.write(paths.root);
  return m;
}

RunManifest run_report(const ExperimentConfig& config, const CommandOptions& options) {
  const auto c = effective_config(config, options);
  const ArtifactPaths paths{options.out};
  auto m = start(c, "report");
  const auto dir = paths.root / "reports";
  if (!fs::exists(dir)) fail(ErrorKind::Orchestration, "no reports under " + dir.string());
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.path().extension() == ".json") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  csv::Table t({"file", "kind", "stage", "seed", "snr", "validation_nmse", "snr_test", "snr_reconstructed", "gain"});
  for (const auto& f : files) {
    std::ifstream in(f);
    json j;
    try {
      j = json::parse(in);
    } catch (const json::exception& e) {
      fail(ErrorKind::Parse, f.string() + ": " + e.what());
    }
    const auto& r = j.at("report");
    t.add_row({f.filename().string(), j.value("kind", ""), j.value("stage", ""),
               std::to_string(j.at("seed").get<std::uint64_t>()), num(j.at("snr").get<double>()),
               num(j.at("validation_nmse").get<double>()), num(r.at("snr_test").get<double>()),
               num(r.at("snr_reconstructed").get<double>()), num(r.at("denoising_gain").get<double>())});
  }
  t.write(paths.root / "summary.csv");
  m.add(paths.root, paths.root / "summary.csv");
  m.write(paths.root);
  return m;
}

}  // namespace rcdenoise
