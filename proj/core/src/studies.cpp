#include "rcdenoise/studies.hpp"

#include <array>
#include <cmath>
#include <limits>

#include "rcdenoise/csv.hpp"
#include "rcdenoise/ekf.hpp"
#include "rcdenoise/error.hpp"
#include "rcdenoise/parallel.hpp"

namespace rcdenoise {

namespace {

double stage_value(const StageComparisonRow& r, Stage s) {
  switch (s) {
    case Stage::Trained: return r.trained;
    case Stage::Tuned: return r.tuned;
    case Stage::Truncated: return r.truncated;
  }
  return 0.0;
}

std::size_t jobs_for(const ExperimentConfig& c) { return resolve_jobs(c.jobs); }

}  // namespace

double StageComparison::mean_log10(Stage stage) const {
  double s = 0.0;
  for (const auto& r : rows) s += std::log10(stage_value(r, stage));
  return s / static_cast<double>(rows.size());
}

double StageComparison::mean(Stage stage) const {
  double s = 0.0;
  for (const auto& r : rows) s += stage_value(r, stage);
  return s / static_cast<double>(rows.size());
}

std::optional<double> StageComparison::mean_ekf() const {
  double s = 0.0;
  for (const auto& r : rows) {
    if (!r.ekf) return std::nullopt;
    s += *r.ekf;
  }
  return s / static_cast<double>(rows.size());
}

StageComparison compare_stages(const ExperimentConfig& config, double snr, bool with_ekf) {
  config.validate();
  require(!with_ekf || config.system == SystemKind::Lorenz, "compare_stages: the EKF baseline is Lorenz-only");
  const Simulation sim = simulate(config);
  StageComparison out;
  out.snr = snr;
  out.rows.resize(config.seeds.size());
  parallel_for(config.seeds.size(), jobs_for(config), [&](std::size_t k) {
    const auto seed = config.seeds[k];
    const NoiseSpec spec{config.noise_exponent, snr,
                         noise_seed(seed, "train", config.lorenz.sigma, snr, config.noise_exponent)};
    const Recording rec = observe(config, sim, spec);
    const Dataset data = make_dataset(config, {rec});
    const auto result = run_stages(config.pipeline, data, Stage::Truncated, seed, 1, true);
    auto& row = out.rows[k];
    row.seed = seed;
    row.trained = result.at(Stage::Trained).validation_nmse;
    row.tuned = result.at(Stage::Tuned).validation_nmse;
    row.truncated = result.at(Stage::Truncated).validation_nmse;
    row.tuned_phi = result.at(Stage::Tuned).search->best;
    row.truncated_nodes = result.at(Stage::Truncated).esn.n_nodes();
    row.truncated_edges = result.at(Stage::Truncated).esn.edge_count();
    row.audit = result.at(Stage::Truncated).audit;
    if (with_ekf) {
      const Trajectory observed_clean = rec.clean->select(config.observed);
      Vector variance(static_cast<Eigen::Index>(config.observed.size()));
      for (Eigen::Index c = 0; c < variance.size(); ++c) {
        const double amp = rms(observed_clean.values.col(c)) / snr;
        variance[c] = amp * amp;
      }
      const auto tuning = tune_lorenz_ekf(config.lorenz, *rec.noisy, *rec.clean, variance, config.train_rows(),
                                          rec.clean->rows(), config.ekf_q_grid);
      row.ekf = tuning.nmse;
      row.ekf_q = tuning.q;
    }
  });
  return out;
}

void write_stage_comparison(const std::filesystem::path& path, const StageComparison& cmp) {
  csv::Table t({"seed", "snr", "trained", "tuned", "truncated", "ekf", "ekf_q", "truncated_nodes", "truncated_edges"});
  for (const auto& r : cmp.rows)
    t.add_row({std::to_string(r.seed), csv::format_double(cmp.snr), csv::format_double(r.trained),
               csv::format_double(r.tuned), csv::format_double(r.truncated), r.ekf ? csv::format_double(*r.ekf) : "",
               r.ekf ? csv::format_double(r.ekf_q) : "", std::to_string(r.truncated_nodes),
               std::to_string(r.truncated_edges)});
  t.write(path);
}

double GainMatrix::asymmetry() const {
  require(mean.rows() == mean.cols(), "asymmetry: gain matrix must be square");
  return (mean - mean.transpose()).cwiseAbs().rowwise().sum().maxCoeff();
}

GainMatrix gain_matrix(const ExperimentConfig& config) {
  config.validate();
  const Simulation sim = simulate(config);
  const double sigma = config.lorenz.sigma;
  const double e = config.noise_exponent;
  GainMatrix g;
  g.train_snr = config.train_snr;
  g.test_snr = config.test_snr;
  const auto rows = static_cast<Eigen::Index>(g.train_snr.size());
  const auto cols = static_cast<Eigen::Index>(g.test_snr.size());
  g.per_seed.assign(config.seeds.size(), Matrix::Zero(rows, cols));
  const std::size_t cells = config.seeds.size() * g.train_snr.size();
  parallel_for(cells, jobs_for(config), [&](std::size_t task) {
    const std::size_t k = task / g.train_snr.size();
    const auto i = static_cast<Eigen::Index>(task % g.train_snr.size());
    const auto seed = config.seeds[k];
    const double s_train = g.train_snr[static_cast<std::size_t>(i)];
    const Recording rec = observe(config, sim, {e, s_train, noise_seed(seed, "train", sigma, s_train, e)});
    const Dataset data = make_dataset(config, {rec});
    const auto result = run_stages(config.pipeline, data, config.gain_stage, seed, 1, false);
    const auto& esn = result.last().esn;
    for (Eigen::Index j = 0; j < cols; ++j) {
      const double s_test = g.test_snr[static_cast<std::size_t>(j)];
      const Recording test = observe(config, sim, {e, s_test, noise_seed(seed, "test", sigma, s_test, e)});
      g.per_seed[k](i, j) = evaluate_recording(config, esn, test).denoising_gain;
    }
  });
  g.mean = Matrix::Zero(rows, cols);
  for (const auto& m : g.per_seed) g.mean += m / static_cast<double>(g.per_seed.size());
  return g;
}

void write_gain_matrix(const std::filesystem::path& path, const GainMatrix& g) {
  std::vector<std::string> header{"train_snr"};
  for (double s : g.test_snr) header.push_back("test_snr=" + csv::format_double(s));
  csv::Table t(std::move(header));
  for (std::size_t i = 0; i < g.train_snr.size(); ++i) {
    std::vector<std::string> row{csv::format_double(g.train_snr[i])};
    for (Eigen::Index j = 0; j < g.mean.cols(); ++j)
      row.push_back(csv::format_double(g.mean(static_cast<Eigen::Index>(i), j)));
    t.add_row(std::move(row));
  }
  t.write(path);
}

std::vector<double> local_maxima(const Eigen::Ref<const Vector>& x, std::size_t skip) {
  std::vector<double> out;
  for (Eigen::Index i = std::max<Eigen::Index>(1, static_cast<Eigen::Index>(skip)); i + 1 < x.size(); ++i)
    if (x[i] > x[i - 1] && x[i] >= x[i + 1]) out.push_back(x[i]);
  return out;
}

double SweepResult::argmax_sigma(std::size_t snr_index) const {
  require(!sigma.empty(), "argmax_sigma: empty sweep");
  Eigen::Index best = 0;
  mean_gain.col(static_cast<Eigen::Index>(snr_index)).maxCoeff(&best);
  return sigma[static_cast<std::size_t>(best)];
}

SweepResult parameter_sweep(const ExperimentConfig& config) {
  config.validate();
  require(config.system == SystemKind::Lorenz, "parameter_sweep: Lorenz only");
  require(!config.sweep.sigma_grid.empty(), "parameter_sweep: empty sigma grid");
  require(!config.sweep.training.empty(), "parameter_sweep: no training sets");
  const double e = config.noise_exponent;
  SweepResult out;
  out.sigma = config.sweep.sigma_grid;
  out.test_snr = config.test_snr;
  const auto ns = static_cast<Eigen::Index>(out.sigma.size());
  const auto nt = static_cast<Eigen::Index>(out.test_snr.size());

  std::vector<Simulation> grid_sims(out.sigma.size());
  const std::size_t skip = static_cast<std::size_t>(std::llround(config.sweep.transient / config.dt));
  out.x_maxima.resize(out.sigma.size());
  parallel_for(out.sigma.size(), jobs_for(config), [&](std::size_t i) {
    grid_sims[i] = simulate(config, out.sigma[i]);
    out.x_maxima[i] = local_maxima(grid_sims[i].clean->values.col(0), skip);
  });
  std::vector<Simulation> train_sims;
  for (const auto& t : config.sweep.training) train_sims.push_back(simulate(config, t.sigma));

  out.per_seed.assign(config.seeds.size(), Matrix::Zero(ns, nt));
  parallel_for(config.seeds.size(), jobs_for(config), [&](std::size_t k) {
    const auto seed = config.seeds[k];
    std::vector<Recording> recs;
    for (std::size_t t = 0; t < train_sims.size(); ++t) {
      const auto& set = config.sweep.training[t];
      recs.push_back(observe(config, train_sims[t], {e, set.snr, noise_seed(seed, "train", set.sigma, set.snr, e)}));
    }
    const Dataset data = make_dataset(config, recs);
    const auto result = run_stages(config.pipeline, data, config.sweep.stage, seed, 1, false);
    const auto& esn = result.last().esn;
    for (Eigen::Index i = 0; i < ns; ++i)
      for (Eigen::Index j = 0; j < nt; ++j) {
        const double sg = out.sigma[static_cast<std::size_t>(i)];
        const double st = out.test_snr[static_cast<std::size_t>(j)];
        const Recording test = observe(config, grid_sims[static_cast<std::size_t>(i)], {e, st, noise_seed(seed, "test", sg, st, e)});
        out.per_seed[k](i, j) = evaluate_recording(config, esn, test).denoising_gain;
      }
  });
  out.mean_gain = Matrix::Zero(ns, nt);
  for (const auto& m : out.per_seed) out.mean_gain += m / static_cast<double>(out.per_seed.size());
  return out;
}

void write_sweep(const std::filesystem::path& gain_path, const std::filesystem::path& bifurcation_path,
                 const SweepResult& sweep) {
  csv::Table g({"sigma", "snr", "gain"});
  for (std::size_t i = 0; i < sweep.sigma.size(); ++i)
    for (std::size_t j = 0; j < sweep.test_snr.size(); ++j)
      g.add_row({csv::format_double(sweep.sigma[i]), csv::format_double(sweep.test_snr[j]),
                 csv::format_double(sweep.mean_gain(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)))});
  g.write(gain_path);
  csv::Table b({"sigma", "max_x"});
  for (std::size_t i = 0; i < sweep.sigma.size(); ++i)
    for (double m : sweep.x_maxima[i]) b.add_row({csv::format_double(sweep.sigma[i]), csv::format_double(m)});
  b.write(bifurcation_path);
}

double ColorOutcome::mean_gain() const {
  double s = 0.0;
  for (double g : gains) s += g;
  return s / static_cast<double>(gains.size());
}

double ColorOutcome::sd_gain() const {
  if (gains.size() < 2) return 0.0;
  const double m = mean_gain();
  double s = 0.0;
  for (double g : gains) s += (g - m) * (g - m);
  return std::sqrt(s / static_cast<double>(gains.size() - 1));
}

const ColorOutcome& NoiseStudyResult::color(std::string_view name) const {
  for (const auto& c : colors)
    if (c.color.name == name) return c;
  fail(ErrorKind::InvalidArgument, "noise study has no color '" + std::string(name) + "'");
}

namespace {

void accumulate(Psd& acc, const Psd& p, double weight) {
  if (acc.freq.empty()) {
    acc.freq = p.freq;
    acc.power.assign(p.power.size(), 0.0);
  }
  for (std::size_t i = 0; i < p.power.size(); ++i) acc.power[i] += weight * p.power[i];
}

std::vector<double> column(const Eigen::Ref<const Matrix>& m, Eigen::Index c) {
  std::vector<double> v(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) v[static_cast<std::size_t>(i)] = m(i, c);
  return v;
}

}  // namespace

NoiseStudyResult noise_color_study(const ExperimentConfig& config) {
  config.validate();
  const Simulation sim = simulate(config);
  const double snr = 100.0 / config.noise_study.noise_percent;
  const std::size_t begin = config.train_rows();
  const std::size_t end = sim.clean->rows();
  const std::string channel = config.targets.front();
  const double fs = config.sample_rate_hz();
  const std::size_t segment = std::min(config.noise_study.welch_segment, std::size_t{1} << static_cast<int>(std::floor(std::log2(static_cast<double>(end - begin)))));

  NoiseStudyResult out;
  for (const auto& color : config.noise_study.colors) {
    ColorOutcome c;
    c.color = color;
    c.seeds = config.seeds;
    const std::size_t n = config.seeds.size();
    c.gains.assign(n, 0.0);
    c.nodes.assign(n, 0);
    c.reports.resize(n);
    std::vector<std::array<Psd, 4>> psds(n);
    parallel_for(n, jobs_for(config), [&](std::size_t k) {
      const auto seed = config.seeds[k];
      const Recording rec =
          observe(config, sim, {color.exponent, snr, noise_seed(seed, "train", 0.0, snr, color.exponent)});
      const Dataset data = make_dataset(config, {rec});
      const auto result = run_stages(config.pipeline, data, config.noise_study.stage, seed, 1, false);
      const auto& esn = result.last().esn;
      c.reports[k] = evaluate_recording(config, esn, rec);
      c.gains[k] = c.reports[k].denoising_gain;
      c.nodes[k] = esn.n_nodes();

      const Trajectory recon = reconstruct(esn, *rec.noisy).slice(begin, end);
      const Trajectory clean = rec.clean->slice(begin, end);
      const auto rc = static_cast<Eigen::Index>(recon.channel_index(channel));
      const auto cc = static_cast<Eigen::Index>(clean.channel_index(channel));
      const Vector residual = recon.values.col(rc) - clean.values.col(cc);
      psds[k][0] = welch_psd(column(rec.noise->values.middleRows(static_cast<Eigen::Index>(begin),
                                                                  static_cast<Eigen::Index>(end - begin)),
                                    static_cast<Eigen::Index>(rec.noise->channel_index(channel))),
                             fs, segment);
      psds[k][1] = welch_psd(std::vector<double>(residual.data(), residual.data() + residual.size()), fs, segment);
      psds[k][2] = welch_psd(column(clean.values, cc), fs, segment);
      psds[k][3] = welch_psd(column(recon.values, rc), fs, segment);
    });
    const double w = 1.0 / static_cast<double>(n);
    for (const auto& p : psds) {
      accumulate(c.noise_psd, p[0], w);
      accumulate(c.residual_psd, p[1], w);
      accumulate(c.clean_psd, p[2], w);
      accumulate(c.denoised_psd, p[3], w);
    }
    out.colors.push_back(std::move(c));
  }
  return out;
}

void write_noise_study(const std::filesystem::path& dir, const NoiseStudyResult& result) {
  csv::Table gains({"color", "seed", "nodes", "gain"});
  csv::Table summary({"color", "exponent", "mean_gain", "sd_gain", "seeds"});
  for (const auto& c : result.colors) {
    for (std::size_t k = 0; k < c.gains.size(); ++k)
      gains.add_row({c.color.name, std::to_string(c.seeds[k]), std::to_string(c.nodes[k]), csv::format_double(c.gains[k])});
    summary.add_row({c.color.name, csv::format_double(c.color.exponent), csv::format_double(c.mean_gain()),
                     csv::format_double(c.sd_gain()), std::to_string(c.gains.size())});
    write_psd(dir / ("psd_" + c.color.name + "_noise.csv"), c.noise_psd);
    write_psd(dir / ("psd_" + c.color.name + "_residual.csv"), c.residual_psd);
    write_psd(dir / ("psd_" + c.color.name + "_clean.csv"), c.clean_psd);
    write_psd(dir / ("psd_" + c.color.name + "_denoised.csv"), c.denoised_psd);
  }
  gains.write(dir / "gains.csv");
  summary.write(dir / "summary.csv");
}

}  // namespace rcdenoise
