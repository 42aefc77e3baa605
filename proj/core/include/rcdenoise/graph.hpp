#pragma once

#include <vector>

#include "rcdenoise/reservoir.hpp"

namespace rcdenoise::graph {

/// In-degree plus out-degree of every node (self-loops ignored).
[[nodiscard]] std::vector<double> degree(const EdgeMask& edges);

/// Local clustering coefficient on the undirected support graph; nodes with
/// fewer than two neighbours get 0.
[[nodiscard]] std::vector<double> clustering(const EdgeMask& edges);

/// PageRank of the directed graph where weights(i, j) != 0 is an edge j -> i
/// with weight |weights(i, j)|. Dangling nodes spread their rank uniformly.
[[nodiscard]] std::vector<double> pagerank(const Eigen::Ref<const Matrix>& weights, double damping = 0.85);

/// Min-max normalization to [0, 1]; a constant vector maps to all zeros.
[[nodiscard]] std::vector<double> min_max_normalize(const std::vector<double>& values);

}  // namespace rcdenoise::graph
