#include "rcdenoise/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include <nlohmann/json.hpp>

#include "rcdenoise/ekf.hpp"
#include "rcdenoise/error.hpp"

namespace rcdenoise {

using nlohmann::json;

std::string_view to_string(SystemKind kind) noexcept { return kind == SystemKind::Lorenz ? "lorenz" : "adex"; }

std::string_view to_string(Stage stage) noexcept {
  switch (stage) {
    case Stage::Trained: return "trained";
    case Stage::Tuned: return "tuned";
    case Stage::Truncated: return "truncated";
  }
  return "unknown";
}

Stage parse_stage(std::string_view text) {
  if (text == "trained") return Stage::Trained;
  if (text == "tuned") return Stage::Tuned;
  if (text == "truncated") return Stage::Truncated;
  fail(ErrorKind::Config, "unknown stage '" + std::string(text) + "' (expected trained, tuned or truncated)");
}

namespace {

std::vector<double> default_sigma_grid() {
  std::vector<double> grid;
  for (int i = 0; i <= 40; ++i) grid.push_back(0.5 * i);
  return grid;
}

}  // namespace

ExperimentConfig ExperimentConfig::lorenz_defaults() {
  ExperimentConfig c;
  c.ekf_q_grid = default_q_grid();
  c.sweep.sigma_grid = default_sigma_grid();
  return c;
}

ExperimentConfig ExperimentConfig::adex_defaults() {
  ExperimentConfig c;
  c.system = SystemKind::Adex;
  c.dt = 0.01;
  c.duration = 400.0;
  c.train_end = 200.0;
  c.observed = {"V", "w"};
  c.targets = {"V", "w"};
  c.train_snr = {10.0};
  c.test_snr = {10.0};
  c.gain_stage = Stage::Truncated;
  c.pipeline.baseline.n_nodes = 100;
  c.pipeline.space = SearchSpace::with_fixed_nodes(100);
  c.pipeline.space.n_nodes = {50.0, 100.0};
  c.ekf_q_grid = default_q_grid();
  c.sweep.sigma_grid = {};
  c.sweep.training = {};
  return c;
}

std::vector<std::string> ExperimentConfig::system_channels() const {
  if (system == SystemKind::Lorenz) return {"x", "y", "z"};
  return {"V", "w"};
}

std::size_t ExperimentConfig::rows() const {
  return static_cast<std::size_t>(std::floor(duration / dt + 1e-9)) + 1;
}

std::size_t ExperimentConfig::train_rows() const { return static_cast<std::size_t>(std::llround(train_end / dt)); }

double ExperimentConfig::sample_rate_hz() const { return system == SystemKind::Lorenz ? 1.0 / dt : 1000.0 / dt; }

void ExperimentConfig::validate() const {
  auto check = [](bool ok, const std::string& msg) {
    if (!ok) fail(ErrorKind::Config, msg);
  };
  check(std::isfinite(dt) && dt > 0.0, "dt must be positive");
  check(std::isfinite(duration) && duration >= dt, "duration must be at least dt");
  check(train_end > 0.0 && train_end < duration, "train_end must lie strictly inside the recording");
  const auto channels = system_channels();
  auto subset = [&channels](const std::vector<std::string>& names) {
    return !names.empty() && std::all_of(names.begin(), names.end(), [&](const std::string& n) {
      return std::find(channels.begin(), channels.end(), n) != channels.end();
    });
  };
  check(subset(observed), "observed channels must be a non-empty subset of the system channels");
  check(subset(targets), "target channels must be a non-empty subset of the system channels");
  check(std::isfinite(noise_exponent), "noise exponent must be finite");
  for (const auto* grid : {&train_snr, &test_snr}) {
    check(!grid->empty(), "SNR grids must be non-empty");
    for (double s : *grid) check(std::isfinite(s) && s > 0.0, "SNR values must be positive");
  }
  check(!seeds.empty(), "need at least one seed");
  check(pipeline.objective_seeds >= 1, "objective_seeds must be at least 1");
  const std::size_t train = train_rows();
  check(train > pipeline.reservoir.washout + 2 * pipeline.ridge.folds,
        "training segment too short for the washout and cross-validation folds");
  check(rows() > train, "validation segment is empty");
  for (double q : ekf_q_grid) check(std::isfinite(q) && q >= 0.0, "EKF q grid entries must be >= 0");
  for (const auto& t : sweep.training) check(t.snr > 0.0 && std::isfinite(t.sigma), "invalid sweep training set");
  check(noise_study.noise_percent > 0.0, "noise_percent must be positive");
  try {
    pipeline.baseline.validate();
    pipeline.ridge.validate();
    pipeline.space.validate();
    pipeline.prune.validate();
    lorenz.validate();
    adex.validate();
    if (pipeline.search.budget == 0) fail(ErrorKind::InvalidArgument, "search budget must be at least 1");
    if (pipeline.baseline.n_nodes < 2) fail(ErrorKind::InvalidArgument, "baseline needs at least 2 nodes");
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Config) throw;
    fail(ErrorKind::Config, std::string(e.what()));
  }
}

namespace {

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) fail(ErrorKind::Config, "'" + where + "' must be an object");
  for (const auto& [key, value] : j.items()) {
    (void)value;
    const bool ok = std::any_of(allowed.begin(), allowed.end(), [&key](const char* a) { return key == a; });
    if (!ok) fail(ErrorKind::Config, "unknown key '" + key + "' in '" + where + "'");
  }
}

template <class T>
void read(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

Bound read_bound(const json& j, const std::string& where) {
  if (j.is_number()) return {j.get<double>(), j.get<double>()};
  if (!j.is_array() || j.size() != 2) fail(ErrorKind::Config, "'" + where + "' must be [lower, upper]");
  return {j[0].get<double>(), j[1].get<double>()};
}

void read_hyper(const json& j, HyperParams& h, const std::string& where) {
  check_keys(j, {"n_nodes", "leakage", "spectral_radius", "input_scaling", "connectivity"}, where);
  read(j, "n_nodes", h.n_nodes);
  read(j, "leakage", h.leakage);
  read(j, "spectral_radius", h.spectral_radius);
  read(j, "input_scaling", h.input_scaling);
  read(j, "connectivity", h.connectivity);
}

Stage read_stage(const json& j) { return parse_stage(j.get<std::string>()); }

void read_pipeline(const json& j, PipelineSettings& p) {
  check_keys(j, {"baseline", "reservoir", "standardize", "ridge", "search", "prune", "objective_seeds"}, "pipeline");
  bool nodes_set = false;
  if (j.contains("baseline")) read_hyper(j.at("baseline"), p.baseline, "pipeline.baseline");
  if (j.contains("reservoir")) {
    const auto& r = j.at("reservoir");
    check_keys(r, {"bias_constant", "bias_scale", "input_connectivity", "washout"}, "pipeline.reservoir");
    read(r, "bias_constant", p.reservoir.bias_constant);
    read(r, "bias_scale", p.reservoir.bias_scale);
    read(r, "input_connectivity", p.reservoir.input_connectivity);
    read(r, "washout", p.reservoir.washout);
  }
  read(j, "standardize", p.standardize);
  read(j, "objective_seeds", p.objective_seeds);
  if (j.contains("ridge")) {
    const auto& r = j.at("ridge");
    check_keys(r, {"fixed_lambda", "lambda_grid", "folds"}, "pipeline.ridge");
    if (r.contains("fixed_lambda")) {
      if (r.at("fixed_lambda").is_null())
        p.ridge.fixed_lambda.reset();
      else
        p.ridge.fixed_lambda = r.at("fixed_lambda").get<double>();
    }
    read(r, "lambda_grid", p.ridge.lambda_grid);
    read(r, "folds", p.ridge.folds);
  }
  if (j.contains("search")) {
    const auto& s = j.at("search");
    check_keys(s, {"budget", "method", "candidates", "space"}, "pipeline.search");
    read(s, "budget", p.search.budget);
    read(s, "candidates", p.search.candidates);
    if (s.contains("method")) {
      const auto m = s.at("method").get<std::string>();
      if (m == "surrogate")
        p.search.method = SearchMethod::Surrogate;
      else if (m == "random")
        p.search.method = SearchMethod::Random;
      else
        fail(ErrorKind::Config, "search method must be 'surrogate' or 'random'");
    }
    if (s.contains("space")) {
      const auto& sp = s.at("space");
      check_keys(sp, {"n_nodes", "leakage", "spectral_radius", "input_scaling", "connectivity"}, "pipeline.search.space");
      if (sp.contains("n_nodes")) {
        p.space.n_nodes = read_bound(sp.at("n_nodes"), "n_nodes");
        nodes_set = true;
      }
      if (sp.contains("leakage")) p.space.leakage = read_bound(sp.at("leakage"), "leakage");
      if (sp.contains("spectral_radius")) p.space.spectral_radius = read_bound(sp.at("spectral_radius"), "spectral_radius");
      if (sp.contains("input_scaling")) p.space.input_scaling = read_bound(sp.at("input_scaling"), "input_scaling");
      if (sp.contains("connectivity")) p.space.connectivity = read_bound(sp.at("connectivity"), "connectivity");
    }
  }
  if (!nodes_set && !(p.space.n_nodes.upper > p.space.n_nodes.lower)) {
    const auto n = static_cast<double>(p.baseline.n_nodes);
    p.space.n_nodes = {n, n};
  }
  if (j.contains("prune")) {
    const auto& r = j.at("prune");
    check_keys(r, {"prune_fraction", "max_trials", "accept_tolerance", "target_nmse", "retune_budget"}, "pipeline.prune");
    read(r, "prune_fraction", p.prune.prune_fraction);
    read(r, "max_trials", p.prune.max_trials);
    read(r, "accept_tolerance", p.prune.accept_tolerance);
    read(r, "retune_budget", p.prune.retune_budget);
    if (r.contains("target_nmse")) {
      if (r.at("target_nmse").is_null())
        p.prune.target_nmse.reset();
      else
        p.prune.target_nmse = r.at("target_nmse").get<double>();
    }
  }
}

ExperimentConfig parse(const json& j) {
  check_keys(j, {"system", "lorenz", "adex", "current", "dt", "duration", "train_end", "observed", "targets", "noise",
                 "gain_stage", "pipeline", "ekf", "sweep", "noise_study", "seeds", "output_dir", "jobs"},
             "top level");
  const std::string system = j.value("system", std::string("lorenz"));
  ExperimentConfig c;
  if (system == "lorenz")
    c = ExperimentConfig::lorenz_defaults();
  else if (system == "adex")
    c = ExperimentConfig::adex_defaults();
  else
    fail(ErrorKind::Config, "system must be 'lorenz' or 'adex'");

  if (j.contains("lorenz")) {
    const auto& l = j.at("lorenz");
    check_keys(l, {"sigma", "rho", "beta", "x0", "y0", "z0"}, "lorenz");
    read(l, "sigma", c.lorenz.sigma);
    read(l, "rho", c.lorenz.rho);
    read(l, "beta", c.lorenz.beta);
    read(l, "x0", c.lorenz.x0);
    read(l, "y0", c.lorenz.y0);
    read(l, "z0", c.lorenz.z0);
  }
  if (j.contains("adex")) {
    const auto& a = j.at("adex");
    check_keys(a, {"tau_m", "tau_w", "C", "R", "V_r", "V_T", "Delta_T", "a", "b", "V0", "w0"}, "adex");
    read(a, "tau_m", c.adex.tau_m);
    read(a, "tau_w", c.adex.tau_w);
    read(a, "C", c.adex.C);
    read(a, "R", c.adex.R);
    read(a, "V_r", c.adex.V_r);
    read(a, "V_T", c.adex.V_T);
    read(a, "Delta_T", c.adex.Delta_T);
    read(a, "a", c.adex.a);
    read(a, "b", c.adex.b);
    read(a, "V0", c.adex.V0);
    read(a, "w0", c.adex.w0);
  }
  if (j.contains("current")) {
    const auto& i = j.at("current");
    check_keys(i, {"onset", "duration", "amplitude"}, "current");
    read(i, "onset", c.current.onset);
    read(i, "duration", c.current.duration);
    read(i, "amplitude", c.current.amplitude);
  }
  read(j, "dt", c.dt);
  read(j, "duration", c.duration);
  read(j, "train_end", c.train_end);
  read(j, "observed", c.observed);
  read(j, "targets", c.targets);
  if (j.contains("noise")) {
    const auto& n = j.at("noise");
    check_keys(n, {"exponent", "train_snr", "test_snr"}, "noise");
    read(n, "exponent", c.noise_exponent);
    read(n, "train_snr", c.train_snr);
    read(n, "test_snr", c.test_snr);
  }
  if (j.contains("gain_stage")) c.gain_stage = read_stage(j.at("gain_stage"));
  if (j.contains("pipeline")) read_pipeline(j.at("pipeline"), c.pipeline);
  if (j.contains("ekf")) {
    check_keys(j.at("ekf"), {"q_grid"}, "ekf");
    read(j.at("ekf"), "q_grid", c.ekf_q_grid);
  }
  if (j.contains("sweep")) {
    const auto& s = j.at("sweep");
    check_keys(s, {"sigma_grid", "training", "stage", "transient"}, "sweep");
    read(s, "sigma_grid", c.sweep.sigma_grid);
    read(s, "transient", c.sweep.transient);
    if (s.contains("stage")) c.sweep.stage = read_stage(s.at("stage"));
    if (s.contains("training")) {
      c.sweep.training.clear();
      for (const auto& t : s.at("training")) {
        check_keys(t, {"sigma", "snr"}, "sweep.training");
        TrainingSet set;
        read(t, "sigma", set.sigma);
        read(t, "snr", set.snr);
        c.sweep.training.push_back(set);
      }
    }
  }
  if (j.contains("noise_study")) {
    const auto& s = j.at("noise_study");
    check_keys(s, {"colors", "noise_percent", "stage", "welch_segment"}, "noise_study");
    read(s, "noise_percent", c.noise_study.noise_percent);
    read(s, "welch_segment", c.noise_study.welch_segment);
    if (s.contains("stage")) c.noise_study.stage = read_stage(s.at("stage"));
    if (s.contains("colors")) {
      c.noise_study.colors.clear();
      for (const auto& col : s.at("colors")) {
        check_keys(col, {"name", "exponent"}, "noise_study.colors");
        c.noise_study.colors.push_back({col.at("name").get<std::string>(), col.at("exponent").get<double>()});
      }
    }
  }
  read(j, "seeds", c.seeds);
  if (j.contains("output_dir")) c.output_dir = j.at("output_dir").get<std::string>();
  read(j, "jobs", c.jobs);
  c.validate();
  return c;
}

json bound_json(const Bound& b) { return json::array({b.lower, b.upper}); }

}  // namespace

ExperimentConfig config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::Config, "malformed JSON at byte " + std::to_string(e.byte));
  }
  try {
    return parse(j);
  } catch (const json::exception& e) {
    fail(ErrorKind::Config, std::string(e.what()));
  }
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Config, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return config_from_json(buf.str());
  } catch (const Error& e) {
    fail(ErrorKind::Config, path.string() + ": " + e.what());
  }
}

std::string config_to_json(const ExperimentConfig& c) {
  json j;
  j["system"] = std::string(to_string(c.system));
  j["lorenz"] = {{"sigma", c.lorenz.sigma}, {"rho", c.lorenz.rho}, {"beta", c.lorenz.beta},
                 {"x0", c.lorenz.x0},       {"y0", c.lorenz.y0},   {"z0", c.lorenz.z0}};
  j["adex"] = {{"tau_m", c.adex.tau_m}, {"tau_w", c.adex.tau_w},     {"C", c.adex.C}, {"R", c.adex.R},
               {"V_r", c.adex.V_r},     {"V_T", c.adex.V_T},         {"Delta_T", c.adex.Delta_T},
               {"a", c.adex.a},         {"b", c.adex.b},             {"V0", c.adex.V0}, {"w0", c.adex.w0}};
  j["current"] = {{"onset", c.current.onset}, {"duration", c.current.duration}, {"amplitude", c.current.amplitude}};
  j["dt"] = c.dt;
  j["duration"] = c.duration;
  j["train_end"] = c.train_end;
  j["observed"] = c.observed;
  j["targets"] = c.targets;
  j["noise"] = {{"exponent", c.noise_exponent}, {"train_snr", c.train_snr}, {"test_snr", c.test_snr}};
  j["gain_stage"] = std::string(to_string(c.gain_stage));
  const auto& p = c.pipeline;
  json pipeline;
  pipeline["baseline"] = {{"n_nodes", p.baseline.n_nodes},
                          {"leakage", p.baseline.leakage},
                          {"spectral_radius", p.baseline.spectral_radius},
                          {"input_scaling", p.baseline.input_scaling},
                          {"connectivity", p.baseline.connectivity}};
  pipeline["reservoir"] = {{"bias_constant", p.reservoir.bias_constant},
                           {"bias_scale", p.reservoir.bias_scale},
                           {"input_connectivity", p.reservoir.input_connectivity},
                           {"washout", p.reservoir.washout}};
  pipeline["standardize"] = p.standardize;
  pipeline["objective_seeds"] = p.objective_seeds;
  pipeline["ridge"] = {{"fixed_lambda", p.ridge.fixed_lambda ? json(*p.ridge.fixed_lambda) : json(nullptr)},
                       {"lambda_grid", p.ridge.lambda_grid},
                       {"folds", p.ridge.folds}};
  pipeline["search"] = {{"budget", p.search.budget},
                        {"method", p.search.method == SearchMethod::Random ? "random" : "surrogate"},
                        {"candidates", p.search.candidates},
                        {"space",
                         {{"n_nodes", bound_json(p.space.n_nodes)},
                          {"leakage", bound_json(p.space.leakage)},
                          {"spectral_radius", bound_json(p.space.spectral_radius)},
                          {"input_scaling", bound_json(p.space.input_scaling)},
                          {"connectivity", bound_json(p.space.connectivity)}}}};
  pipeline["prune"] = {{"prune_fraction", p.prune.prune_fraction},
                       {"max_trials", p.prune.max_trials},
                       {"accept_tolerance", p.prune.accept_tolerance},
                       {"target_nmse", p.prune.target_nmse ? json(*p.prune.target_nmse) : json(nullptr)},
                       {"retune_budget", p.prune.retune_budget}};
  j["pipeline"] = std::move(pipeline);
  j["ekf"] = {{"q_grid", c.ekf_q_grid}};
  json training = json::array();
  for (const auto& t : c.sweep.training) training.push_back({{"sigma", t.sigma}, {"snr", t.snr}});
  j["sweep"] = {{"sigma_grid", c.sweep.sigma_grid},
                {"training", training},
                {"stage", std::string(to_string(c.sweep.stage))},
                {"transient", c.sweep.transient}};
  json colors = json::array();
  for (const auto& col : c.noise_study.colors) colors.push_back({{"name", col.name}, {"exponent", col.exponent}});
  j["noise_study"] = {{"colors", colors},
                      {"noise_percent", c.noise_study.noise_percent},
                      {"stage", std::string(to_string(c.noise_study.stage))},
                      {"welch_segment", c.noise_study.welch_segment}};
  j["seeds"] = c.seeds;
  j["output_dir"] = c.output_dir.string();
  j["jobs"] = c.jobs;
  return j.dump(2);
}

std::uint64_t config_hash(const ExperimentConfig& config) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : config_to_json(config)) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace rcdenoise
