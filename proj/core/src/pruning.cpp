#include "rcdenoise/pruning.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "rcdenoise/csv.hpp"
#include "rcdenoise/error.hpp"
#include "rcdenoise/graph.hpp"
#include "rcdenoise/hyperopt.hpp"
#include "rcdenoise/random.hpp"

namespace rcdenoise {

std::vector<NodeScore> node_scores(const EchoStateNetwork& esn, const Eigen::Ref<const Matrix>& states) {
  require(states.rows() > 0, "node_scores: empty state matrix");
  require(static_cast<std::size_t>(states.cols()) == esn.n_nodes(), "node_scores: state width does not match the network");
  const std::size_t n = esn.n_nodes();
  const Vector mean = states.colwise().mean().transpose();
  const Vector var = (states.rowwise() - mean.transpose()).colwise().squaredNorm().transpose() /
                     static_cast<double>(states.rows());
  std::vector<double> abs_mean(n);
  std::vector<double> variance(n);
  for (std::size_t i = 0; i < n; ++i) {
    abs_mean[i] = std::abs(mean[static_cast<Eigen::Index>(i)]);
    variance[i] = var[static_cast<Eigen::Index>(i)];
  }
  const auto deg = graph::degree(esn.edges);
  const auto clus = graph::clustering(esn.edges);
  const auto pr = graph::pagerank(esn.w_res);
  const auto n_mean = graph::min_max_normalize(abs_mean);
  const auto n_var = graph::min_max_normalize(variance);
  const auto n_deg = graph::min_max_normalize(deg);
  const auto n_clus = graph::min_max_normalize(clus);
  const auto n_pr = graph::min_max_normalize(pr);

  std::vector<NodeScore> scores(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto& s = scores[i];
    s.node_id = i;
    s.abs_mean_state = abs_mean[i];
    s.state_variance = variance[i];
    s.degree = deg[i];
    s.clustering = clus[i];
    s.pagerank = pr[i];
    s.norm_abs_mean_state = n_mean[i];
    s.norm_state_variance = n_var[i];
    s.norm_degree = n_deg[i];
    s.norm_clustering = n_clus[i];
    s.norm_pagerank = n_pr[i];
    s.composite = n_mean[i] + n_var[i] + n_deg[i] + n_clus[i] + n_pr[i];
  }
  return scores;
}

void PruneConfig::validate() const {
  require(prune_fraction > 0.0 && prune_fraction < 1.0, "prune_fraction must lie in (0, 1)");
  require(max_trials >= 1, "max_trials must be at least 1");
  require(std::isfinite(accept_tolerance) && accept_tolerance >= 0.0, "accept_tolerance must be >= 0");
  require(!target_nmse || (std::isfinite(*target_nmse) && *target_nmse >= 0.0), "target_nmse must be >= 0");
}

std::string_view to_string(AuditAction action) noexcept {
  switch (action) {
    case AuditAction::PruneNode: return "prune_node";
    case AuditAction::PruneEdge: return "prune_edge";
    case AuditAction::Grow: return "grow";
    case AuditAction::Retune: return "retune";
  }
  return "unknown";
}

namespace {

std::size_t batch_size(double fraction, std::size_t count) {
  return static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(count) - 1e-9));
}

struct Candidate {
  EchoStateNetwork esn;
  double nmse = 0.0;
};

// Refit after a structural edit. Numerical failures reject the trial.
std::optional<Candidate> refit(EchoStateNetwork esn, const Dataset& data, const RidgeConfig& ridge) {
  try {
    restore_spectral_radius(esn);
    const auto fit = fit_readout(esn, data, ridge);
    if (!std::isfinite(fit.validation_nmse)) return std::nullopt;
    return Candidate{std::move(esn), fit.validation_nmse};
  } catch (const Error& e) {
    if (!e.is_numeric()) throw;
    return std::nullopt;
  }
}

/// Shared accept/reject loop. `nominate(current, skip)` returns the batch
/// ranked `skip` batches past the best, or nothing once candidates run out.
template <class Nominate, class Apply>
PruneResult greedy(const EchoStateNetwork& start, const Dataset& data, const PruneConfig& config,
                   const RidgeConfig& ridge, AuditAction action, Nominate nominate, Apply apply) {
  config.validate();
  PruneResult result;
  EchoStateNetwork current = start;
  const auto base = fit_readout(current, data, ridge);
  result.initial_nmse = base.validation_nmse;
  double current_nmse = base.validation_nmse;
  result.esn = current;
  result.nmse = current_nmse;

  std::size_t skip = 0;
  for (std::size_t trial = 1; trial <= config.max_trials; ++trial) {
    if (config.target_nmse && current_nmse <= *config.target_nmse) break;
    auto batch = nominate(current, skip);
    if (!batch) break;
    EchoStateNetwork edited = current;
    const std::string ids = apply(edited, *batch);
    auto cand = refit(std::move(edited), data, ridge);
    AuditEntry entry;
    entry.round = trial;
    entry.action = action;
    entry.ids = ids;
    entry.nmse_before = current_nmse;
    entry.nmse_after = cand ? cand->nmse : std::numeric_limits<double>::infinity();
    entry.accepted = cand && cand->nmse <= (1.0 + config.accept_tolerance) * current_nmse;
    result.audit.push_back(entry);
    if (!entry.accepted) {
      ++skip;
      continue;
    }
    current = std::move(cand->esn);
    current_nmse = cand->nmse;
    skip = 0;
    if (current_nmse <= result.nmse) {
      result.esn = current;
      result.nmse = current_nmse;
    }
  }
  return result;
}

std::string join_ids(const std::vector<std::size_t>& ids) {
  std::ostringstream out;
  for (std::size_t i = 0; i < ids.size(); ++i) out << (i ? ";" : "") << ids[i];
  return out.str();
}

}  // namespace

PruneResult prune_nodes(const EchoStateNetwork& esn, const Dataset& data, const PruneConfig& config,
                        const RidgeConfig& ridge) {
  require(esn.trained(), "prune_nodes: network must be trained");
  if (esn.n_nodes() <= 2) fail(ErrorKind::PruneFloor, "prune_nodes: cannot prune below 2 nodes");
  auto nominate = [&](const EchoStateNetwork& cur, std::size_t skip) -> std::optional<std::vector<std::size_t>> {
    const std::size_t n = cur.n_nodes();
    const std::size_t k = std::min(batch_size(config.prune_fraction, n), n - 2);
    if (k == 0) return std::nullopt;
    const auto scores = node_scores(cur, training_states(cur, data));
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&scores](std::size_t a, std::size_t b) { return scores[a].composite < scores[b].composite; });
    const std::size_t from = skip * k;
    if (from + k > n) return std::nullopt;
    return std::vector<std::size_t>(order.begin() + static_cast<std::ptrdiff_t>(from),
                                    order.begin() + static_cast<std::ptrdiff_t>(from + k));
  };
  auto apply = [](EchoStateNetwork& net, std::vector<std::size_t> ids) {
    std::sort(ids.begin(), ids.end());
    remove_nodes(net, ids);
    return join_ids(ids);
  };
  return greedy(esn, data, config, ridge, AuditAction::PruneNode, nominate, apply);
}

PruneResult prune_edges(const EchoStateNetwork& esn, const Dataset& data, const PruneConfig& config,
                        const RidgeConfig& ridge) {
  require(esn.trained(), "prune_edges: network must be trained");
  using Edge = std::pair<std::size_t, std::size_t>;  // (to, from)
  auto nominate = [&](const EchoStateNetwork& cur, std::size_t skip) -> std::optional<std::vector<Edge>> {
    const std::size_t e = cur.edge_count();
    const std::size_t k = batch_size(config.prune_fraction, e);
    if (k == 0 || e == 0) return std::nullopt;
    if (k >= e) fail(ErrorKind::DegenerateTopology, "prune_edges: batch would remove every edge");
    const auto scores = node_scores(cur, training_states(cur, data));
    std::vector<std::pair<double, Edge>> ranked;
    ranked.reserve(e);
    const auto n = static_cast<Eigen::Index>(cur.n_nodes());
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index i = 0; i < n; ++i)
        if (cur.edges(i, j)) {
          const auto to = static_cast<std::size_t>(i);
          const auto from = static_cast<std::size_t>(j);
          const double importance =
              std::abs(cur.w_res(i, j)) * 0.5 * (scores[to].composite + scores[from].composite);
          ranked.push_back({importance, {to, from}});
        }
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    const std::size_t from = skip * k;
    if (from + k > e) return std::nullopt;
    std::vector<Edge> batch;
    batch.reserve(k);
    for (std::size_t r = from; r < from + k; ++r) batch.push_back(ranked[r].second);
    return batch;
  };
  auto apply = [](EchoStateNetwork& net, const std::vector<Edge>& batch) {
    remove_edges(net, batch);
    std::ostringstream out;
    for (std::size_t i = 0; i < batch.size(); ++i) out << (i ? ";" : "") << batch[i].second << '>' << batch[i].first;
    return out.str();
  };
  return greedy(esn, data, config, ridge, AuditAction::PruneEdge, nominate, apply);
}

PruneResult truncate(const EchoStateNetwork& esn, const Dataset& data, const PruneConfig& config,
                     const RidgeConfig& ridge) {
  auto nodes = prune_nodes(esn, data, config, ridge);
  auto edges = prune_edges(nodes.esn, data, config, ridge);
  PruneResult out;
  out.initial_nmse = nodes.initial_nmse;
  out.audit = std::move(nodes.audit);
  const std::size_t offset = out.audit.size();
  for (auto& e : edges.audit) {
    e.round += offset;
    out.audit.push_back(std::move(e));
  }
  out.esn = std::move(edges.esn);
  out.nmse = edges.nmse;
  if (config.retune_budget > 0) {
    auto tuned = retune(out.esn, data, config.retune_budget, esn.seed, ridge);
    for (auto& e : tuned.audit) {
      e.round += out.audit.size();
      out.audit.push_back(std::move(e));
    }
    out.esn = std::move(tuned.esn);
    out.nmse = tuned.nmse;
  }
  return out;
}

void add_nodes(EchoStateNetwork& esn, std::size_t k, std::uint64_t seed) {
  if (k == 0) return;
  const auto n = static_cast<Eigen::Index>(esn.n_nodes());
  const auto m = n + static_cast<Eigen::Index>(k);
  const auto d = esn.w_in.cols();
  Rng rng(seed);

  double scale = 1.0;
  if (esn.edge_count() > 0) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j)
        if (esn.edges(i, j)) total += std::abs(esn.w_res(i, j));
    // Uniform(-1,1) has mean |w| of 1/2; match the current weight magnitude.
    scale = 2.0 * total / static_cast<double>(esn.edge_count());
  }

  Matrix w_res = Matrix::Zero(m, m);
  EdgeMask edges = EdgeMask::Constant(m, m, false);
  w_res.topLeftCorner(n, n) = esn.w_res;
  edges.topLeftCorner(n, n) = esn.edges;
  const double p = esn.hyper.connectivity;
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j) {
      if (i == j || (i < n && j < n)) continue;
      if (rng.bernoulli(p)) {
        edges(i, j) = true;
        w_res(i, j) = scale * rng.uniform(-1.0, 1.0);
      }
    }
  Matrix w_in(m, d);
  w_in.topRows(n) = esn.w_in;
  Vector bias(m);
  bias.head(n) = esn.bias;
  for (Eigen::Index i = n; i < m; ++i) {
    for (Eigen::Index c = 0; c < d; ++c)
      w_in(i, c) = rng.bernoulli(esn.options.input_connectivity)
                       ? rng.uniform(-esn.hyper.input_scaling, esn.hyper.input_scaling)
                       : 0.0;
    bias[i] = esn.options.bias_constant +
              (esn.options.bias_scale > 0.0 ? rng.uniform(-esn.options.bias_scale, esn.options.bias_scale) : 0.0);
  }
  esn.w_res = std::move(w_res);
  esn.edges = std::move(edges);
  esn.w_in = std::move(w_in);
  esn.bias = std::move(bias);
  esn.hyper.n_nodes = static_cast<std::size_t>(m);
  esn.w_out.reset();
}

PruneResult grow(const EchoStateNetwork& esn, const Dataset& data, const PruneConfig& config, std::size_t k,
                 std::uint64_t seed, const RidgeConfig& ridge) {
  require(esn.trained(), "grow: network must be trained");
  config.validate();
  PruneResult result;
  EchoStateNetwork current = esn;
  result.initial_nmse = fit_readout(current, data, ridge).validation_nmse;
  result.esn = current;
  result.nmse = result.initial_nmse;
  if (k == 0) return result;
  double current_nmse = result.initial_nmse;
  for (std::size_t round = 1; round <= config.max_trials; ++round) {
    if (config.target_nmse && current_nmse <= *config.target_nmse) break;
    EchoStateNetwork edited = current;
    const std::size_t first = edited.n_nodes();
    add_nodes(edited, k, derive_seed(seed, {0x67726f77ULL, round}));
    auto cand = refit(std::move(edited), data, ridge);
    std::vector<std::size_t> ids(k);
    std::iota(ids.begin(), ids.end(), first);
    AuditEntry entry;
    entry.round = round;
    entry.action = AuditAction::Grow;
    entry.ids = join_ids(ids);
    entry.nmse_before = current_nmse;
    entry.nmse_after = cand ? cand->nmse : std::numeric_limits<double>::infinity();
    entry.accepted = cand && cand->nmse <= (1.0 + config.accept_tolerance) * current_nmse;
    result.audit.push_back(entry);
    if (!entry.accepted) continue;
    current = std::move(cand->esn);
    current_nmse = cand->nmse;
    if (current_nmse <= result.nmse) {
      result.esn = current;
      result.nmse = current_nmse;
    }
  }
  return result;
}

namespace {

EchoStateNetwork with_dynamics(const EchoStateNetwork& esn, const HyperParams& phi) {
  EchoStateNetwork out = esn;
  if (esn.hyper.input_scaling > 0.0) out.w_in *= phi.input_scaling / esn.hyper.input_scaling;
  out.hyper.leakage = phi.leakage;
  out.hyper.spectral_radius = phi.spectral_radius;
  out.hyper.input_scaling = phi.input_scaling;
  out.w_out.reset();
  return out;
}

}  // namespace

PruneResult retune(const EchoStateNetwork& esn, const Dataset& data, std::size_t budget, std::uint64_t seed,
                   const RidgeConfig& ridge) {
  PruneResult result;
  EchoStateNetwork current = esn;
  result.initial_nmse = fit_readout(current, data, ridge).validation_nmse;
  result.esn = current;
  result.nmse = result.initial_nmse;

  SearchSpace space;
  space.n_nodes = {static_cast<double>(esn.n_nodes()), static_cast<double>(esn.n_nodes())};
  space.connectivity = {esn.hyper.connectivity, esn.hyper.connectivity};
  // Keep the current point inside the box so retuning can only help.
  space.leakage.lower = std::min(space.leakage.lower, esn.hyper.leakage);
  space.spectral_radius.lower = std::min(space.spectral_radius.lower, esn.hyper.spectral_radius);
  space.input_scaling.lower = std::min(space.input_scaling.lower, esn.hyper.input_scaling);
  space.input_scaling.upper = std::max(space.input_scaling.upper, esn.hyper.input_scaling);

  auto objective_fn = [&](const HyperParams& phi) {
    auto cand = refit(with_dynamics(esn, phi), data, ridge);
    if (!cand) return EvalOutcome::failure("refit failed");
    EvalOutcome out;
    out.loss = cand->nmse;
    out.lambda = cand->esn.ridge_lambda;
    return out;
  };
  OptimizerOptions options;
  options.budget = budget;
  const auto opt = optimize(space, objective_fn, options, derive_seed(seed, "retune"));

  AuditEntry entry;
  entry.round = 1;
  entry.action = AuditAction::Retune;
  std::ostringstream ids;
  ids << "alpha=" << opt.best.leakage << ";gamma=" << opt.best.spectral_radius << ";zeta=" << opt.best.input_scaling;
  entry.ids = ids.str();
  entry.nmse_before = result.nmse;
  entry.nmse_after = opt.best_loss;
  entry.accepted = opt.best_loss < result.nmse;
  result.audit.push_back(entry);
  if (entry.accepted) {
    auto cand = refit(with_dynamics(esn, opt.best), data, ridge);
    if (cand) {
      result.esn = std::move(cand->esn);
      result.nmse = cand->nmse;
    }
  }
  return result;
}

void write_audit(const std::filesystem::path& path, const std::vector<AuditEntry>& audit) {
  csv::Table table({"round", "action", "ids", "nmse_before", "nmse_after", "accepted"});
  for (const auto& e : audit)
    table.add_row({std::to_string(e.round), std::string(to_string(e.action)), e.ids, csv::format_double(e.nmse_before),
                   csv::format_double(e.nmse_after), e.accepted ? "1" : "0"});
  table.write(path);
}

}  // namespace rcdenoise
