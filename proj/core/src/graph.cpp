#include "rcdenoise/graph.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/LU>

#include "rcdenoise/error.hpp"

namespace rcdenoise::graph {

std::vector<double> degree(const EdgeMask& edges) {
  const auto n = edges.rows();
  std::vector<double> out(static_cast<std::size_t>(n), 0.0);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (i != j && edges(i, j)) {
        out[static_cast<std::size_t>(i)] += 1.0;
        out[static_cast<std::size_t>(j)] += 1.0;
      }
  return out;
}

std::vector<double> clustering(const EdgeMask& edges) {
  require(edges.rows() == edges.cols(), "clustering: mask must be square");
  const auto n = edges.rows();
  Matrix sym = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (i != j && (edges(i, j) || edges(j, i))) sym(i, j) = 1.0;
  // (A^3)_ii counts each triangle through i twice.
  const Matrix a2 = sym * sym;
  std::vector<double> out(static_cast<std::size_t>(n), 0.0);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double k = sym.row(i).sum();
    if (k < 2.0) continue;
    const double closed = a2.row(i).dot(sym.col(i)) / 2.0;
    out[static_cast<std::size_t>(i)] = closed / (k * (k - 1.0) / 2.0);
  }
  return out;
}

std::vector<double> pagerank(const Eigen::Ref<const Matrix>& weights, double damping) {
  require(weights.rows() == weights.cols(), "pagerank: matrix must be square");
  require(damping >= 0.0 && damping < 1.0, "pagerank: damping must lie in [0, 1)");
  const auto n = weights.rows();
  if (n == 0) return {};
  const Matrix w = weights.cwiseAbs();
  const Vector out_weight = w.colwise().sum().transpose();

  // Column-stochastic transition matrix; dangling columns jump uniformly.
  Matrix transition(n, n);
  const double uniform = 1.0 / static_cast<double>(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    if (out_weight[j] > 0.0)
      transition.col(j) = w.col(j) / out_weight[j];
    else
      transition.col(j).setConstant(uniform);
  }
  // Stationary point of x = d T x + (1 - d)/n, solved directly.
  Matrix system = Matrix::Identity(n, n) - damping * transition;
  const Vector rhs = Vector::Constant(n, (1.0 - damping) * uniform);
  Vector x = system.partialPivLu().solve(rhs);
  x /= x.sum();
  return std::vector<double>(x.data(), x.data() + n);
}

std::vector<double> min_max_normalize(const std::vector<double>& values) {
  std::vector<double> out(values.size(), 0.0);
  if (values.empty()) return out;
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  const double span = *hi - *lo;
  if (!(span > 1e-12 * std::max(std::abs(*lo), std::abs(*hi)))) return out;
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = (values[i] - *lo) / span;
  return out;
}

}  // namespace rcdenoise::graph
