#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "rcdenoise/readout.hpp"
#include "rcdenoise/reservoir.hpp"
#include "rcdenoise/training.hpp"

namespace rcdenoise {

/// Raw and normalized importance metrics of one reservoir node. The five
/// `norm_*` values are min-max normalized over the network; `composite` is
/// their sum.
struct NodeScore {
  std::size_t node_id = 0;
  double abs_mean_state = 0.0;
  double state_variance = 0.0;
  double degree = 0.0;
  double clustering = 0.0;
  double pagerank = 0.0;
  double norm_abs_mean_state = 0.0;
  double norm_state_variance = 0.0;
  double norm_degree = 0.0;
  double norm_clustering = 0.0;
  double norm_pagerank = 0.0;
  double composite = 0.0;
};

[[nodiscard]] std::vector<NodeScore> node_scores(const EchoStateNetwork& esn, const Eigen::Ref<const Matrix>& states);

struct PruneConfig {
  double prune_fraction = 0.05;
  std::size_t max_trials = 20;
  double accept_tolerance = 0.01;
  std::optional<double> target_nmse;
  /// When nonzero, alpha, gamma and zeta are re-optimized on the final
  /// topology with this many evaluations.
  std::size_t retune_budget = 0;

  void validate() const;
};

enum class AuditAction { PruneNode, PruneEdge, Grow, Retune };

[[nodiscard]] std::string_view to_string(AuditAction action) noexcept;

struct AuditEntry {
  std::size_t round = 0;
  AuditAction action = AuditAction::PruneNode;
  std::string ids;  // node ids "3;7", edges "from>to;..."
  double nmse_before = 0.0;
  double nmse_after = 0.0;
  bool accepted = false;
};

struct PruneResult {
  EchoStateNetwork esn;  // trained
  double initial_nmse = 0.0;
  double nmse = 0.0;
  std::vector<AuditEntry> audit;
};

/// Greedy node removal. Each trial deletes the next batch of
/// ceil(prune_fraction * N) lowest-composite nodes, restores gamma, reselects
/// lambda and refits; the batch is kept when validation NMSE stays within
/// (1 + accept_tolerance) of the current accepted value. The lowest-NMSE
/// accepted network is returned.
[[nodiscard]] PruneResult prune_nodes(const EchoStateNetwork& esn, const Dataset& data, const PruneConfig& config,
                                      const RidgeConfig& ridge = {});

/// Same loop over edges ranked by |w| times the mean composite of the endpoints.
[[nodiscard]] PruneResult prune_edges(const EchoStateNetwork& esn, const Dataset& data, const PruneConfig& config,
                                      const RidgeConfig& ridge = {});

/// prune_nodes followed by prune_edges (and the optional retune).
[[nodiscard]] PruneResult truncate(const EchoStateNetwork& esn, const Dataset& data, const PruneConfig& config,
                                   const RidgeConfig& ridge = {});

/// Up to config.max_trials rounds, each adding k nodes with Erdos-Renyi edges
/// at the network's connectivity and fresh input weights.
[[nodiscard]] PruneResult grow(const EchoStateNetwork& esn, const Dataset& data, const PruneConfig& config,
                               std::size_t k, std::uint64_t seed, const RidgeConfig& ridge = {});

/// Appends k nodes to the network (no refit). Exposed for tests.
void add_nodes(EchoStateNetwork& esn, std::size_t k, std::uint64_t seed);

/// Re-optimizes alpha, gamma and zeta on a fixed topology.
[[nodiscard]] PruneResult retune(const EchoStateNetwork& esn, const Dataset& data, std::size_t budget, std::uint64_t seed,
                                 const RidgeConfig& ridge = {});

void write_audit(const std::filesystem::path& path, const std::vector<AuditEntry>& audit);

}  // namespace rcdenoise
