#include "rcdenoise/reservoir.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "rcdenoise/error.hpp"
#include "rcdenoise/random.hpp"

namespace rcdenoise {

void HyperParams::validate() const {
  require(n_nodes >= 1, "reservoir needs at least one node");
  require(std::isfinite(leakage) && leakage >= 0.0 && leakage <= 1.0, "leakage must lie in [0, 1]");
  require(std::isfinite(spectral_radius) && spectral_radius >= 0.0, "spectral radius must be non-negative");
  require(std::isfinite(input_scaling) && input_scaling >= 0.0, "input scaling must be non-negative");
  require(std::isfinite(connectivity) && connectivity >= 0.0 && connectivity <= 1.0,
          "connectivity must lie in [0, 1]");
}

ChannelScaling ChannelScaling::identity(std::size_t channels) {
  const auto n = static_cast<Eigen::Index>(channels);
  return {Vector::Zero(n), Vector::Ones(n)};
}

Matrix ChannelScaling::normalize(const Eigen::Ref<const Matrix>& x) const {
  if (empty()) return x;
  require(x.cols() == offset.size(), "channel scaling width mismatch");
  return (x.rowwise() - offset.transpose()).array().rowwise() / scale.transpose().array();
}

Matrix ChannelScaling::denormalize(const Eigen::Ref<const Matrix>& x) const {
  if (empty()) return x;
  require(x.cols() == offset.size(), "channel scaling width mismatch");
  Matrix out = x.array().rowwise() * scale.transpose().array();
  out.rowwise() += offset.transpose();
  return out;
}

void EchoStateNetwork::validate() const {
  hyper.validate();
  const auto n = w_res.rows();
  require(w_res.cols() == n, "w_res must be square");
  require(w_in.rows() == n, "w_in row count must equal the node count");
  require(bias.size() == n, "bias length must equal the node count");
  require(edges.rows() == n && edges.cols() == n, "edge mask shape must match w_res");
  require(w_res.allFinite() && w_in.allFinite() && bias.allFinite(), "network weights must be finite");
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      require(edges(i, j) || w_res(i, j) == 0.0, "w_res has a nonzero weight outside the edge mask");
  if (w_out) {
    require(w_out->rows() == n, "w_out row count must equal the node count");
    require(output_channels.empty() || static_cast<std::size_t>(w_out->cols()) == output_channels.size(),
            "w_out column count must equal the output channel count");
  }
  require(input_channels.empty() || input_channels.size() == input_dim(), "input channel labels do not match w_in");
  require(input_scaling.empty() || static_cast<std::size_t>(input_scaling.offset.size()) == input_dim(),
          "input scaling width does not match w_in");
}

double spectral_radius(const Eigen::Ref<const Matrix>& m) {
  require(m.rows() == m.cols(), "spectral_radius: matrix must be square");
  require(m.allFinite(), "spectral_radius: matrix must be finite");
  if (m.size() == 0) return 0.0;
  if (m.isZero(0.0)) return 0.0;
  Eigen::EigenSolver<Matrix> solver(m, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) fail(ErrorKind::Instability, "spectral_radius: eigenvalue iteration failed");
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

void restore_spectral_radius(EchoStateNetwork& esn) {
  const double current = spectral_radius(esn.w_res);
  // Below this the matrix is nilpotent up to rounding and rescaling only amplifies noise.
  if (!(current > 1e-12))
    fail(ErrorKind::DegenerateTopology, "reservoir matrix has zero spectral radius (" +
                                            std::to_string(esn.edge_count()) + " edges)");
  esn.w_res *= esn.hyper.spectral_radius / current;
}

EchoStateNetwork build_reservoir(const HyperParams& hyper, std::size_t input_dim, std::uint64_t seed,
                                 const ReservoirOptions& options) {
  hyper.validate();
  require(hyper.n_nodes >= 2, "build_reservoir: need at least 2 nodes");
  require(input_dim >= 1, "build_reservoir: need at least 1 input");
  require(options.input_connectivity > 0.0 && options.input_connectivity <= 1.0,
          "input connectivity must lie in (0, 1]");
  require(options.bias_scale >= 0.0 && std::isfinite(options.bias_constant), "invalid bias options");

  const auto n = static_cast<Eigen::Index>(hyper.n_nodes);
  const auto d = static_cast<Eigen::Index>(input_dim);
  EchoStateNetwork esn;
  esn.hyper = hyper;
  esn.options = options;
  esn.seed = seed;
  esn.w_res = Matrix::Zero(n, n);
  esn.edges = EdgeMask::Constant(n, n, false);

  Rng topology(derive_seed(seed, "topology"));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) continue;
      if (topology.bernoulli(hyper.connectivity)) {
        esn.edges(i, j) = true;
        esn.w_res(i, j) = topology.uniform(-1.0, 1.0);
      }
    }
  }

  Rng input_rng(derive_seed(seed, "input"));
  esn.w_in = Matrix::Zero(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    const bool wired = options.input_connectivity >= 1.0 || input_rng.bernoulli(options.input_connectivity);
    for (Eigen::Index c = 0; c < d; ++c) {
      const double w = input_rng.uniform(-hyper.input_scaling, hyper.input_scaling);
      if (wired) esn.w_in(i, c) = w;
    }
  }

  Rng bias_rng(derive_seed(seed, "bias"));
  esn.bias = Vector::Constant(n, options.bias_constant);
  if (options.bias_scale > 0.0)
    for (Eigen::Index i = 0; i < n; ++i) esn.bias[i] += bias_rng.uniform(-options.bias_scale, options.bias_scale);

  restore_spectral_radius(esn);
  return esn;
}

Vector step(const EchoStateNetwork& esn, const Eigen::Ref<const Vector>& r, const Eigen::Ref<const Vector>& u) {
  require(r.size() == esn.w_res.rows(), "step: state dimension mismatch");
  require(u.size() == esn.w_in.cols(), "step: input dimension mismatch");
  const double a = esn.hyper.leakage;
  Vector pre = esn.w_res * r + esn.w_in * u + esn.bias;
  return (1.0 - a) * r + a * pre.array().tanh().matrix();
}

Matrix run(const EchoStateNetwork& esn, const Eigen::Ref<const Matrix>& inputs, const std::optional<Vector>& r0) {
  require(inputs.rows() >= 1, "run: empty input sequence");
  require(inputs.cols() == esn.w_in.cols(), "run: input channel count does not match w_in");
  const auto n = esn.w_res.rows();
  const auto steps = inputs.rows();
  Vector r = r0 ? *r0 : Vector::Zero(n);
  require(r.size() == n, "run: initial state dimension mismatch");

  const Matrix scaled = esn.input_scaling.normalize(inputs);
  // Input drive for every step at once; column i feeds step i.
  Matrix drive = esn.w_in * scaled.transpose();
  drive.colwise() += esn.bias;

  const double a = esn.hyper.leakage;
  Matrix states(steps, n);
  Vector pre(n);
  for (Eigen::Index i = 0; i < steps; ++i) {
    pre.noalias() = esn.w_res * r;
    pre += drive.col(i);
    r = (1.0 - a) * r + a * pre.array().tanh().matrix();
    if (!r.allFinite()) fail(ErrorKind::Instability, "reservoir state became non-finite at step " + std::to_string(i));
    states.row(i) = r.transpose();
  }
  return states;
}

Matrix run(const EchoStateNetwork& esn, const Trajectory& inputs, const std::optional<Vector>& r0) {
  if (!esn.input_channels.empty() && esn.input_channels != inputs.channel_names)
    return run(esn, inputs.select(esn.input_channels).values, r0);
  return run(esn, inputs.values, r0);
}

void remove_nodes(EchoStateNetwork& esn, std::vector<std::size_t> nodes) {
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  const std::size_t n = esn.n_nodes();
  for (auto id : nodes) require(id < n, "remove_nodes: node id out of range");
  std::vector<Eigen::Index> keep;
  keep.reserve(n - nodes.size());
  for (std::size_t i = 0, k = 0; i < n; ++i) {
    if (k < nodes.size() && nodes[k] == i) {
      ++k;
      continue;
    }
    keep.push_back(static_cast<Eigen::Index>(i));
  }
  const auto m = static_cast<Eigen::Index>(keep.size());
  Matrix w_res(m, m);
  EdgeMask edges(m, m);
  Matrix w_in(m, esn.w_in.cols());
  Vector bias(m);
  for (Eigen::Index a = 0; a < m; ++a) {
    for (Eigen::Index b = 0; b < m; ++b) {
      w_res(a, b) = esn.w_res(keep[a], keep[b]);
      edges(a, b) = esn.edges(keep[a], keep[b]);
    }
    w_in.row(a) = esn.w_in.row(keep[a]);
    bias[a] = esn.bias[keep[a]];
  }
  esn.w_res = std::move(w_res);
  esn.edges = std::move(edges);
  esn.w_in = std::move(w_in);
  esn.bias = std::move(bias);
  esn.hyper.n_nodes = keep.size();
  esn.w_out.reset();
}

void remove_edges(EchoStateNetwork& esn, const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
  const std::size_t n = esn.n_nodes();
  for (auto [to, from] : edges) {
    require(to < n && from < n, "remove_edges: index out of range");
    const auto i = static_cast<Eigen::Index>(to);
    const auto j = static_cast<Eigen::Index>(from);
    esn.edges(i, j) = false;
    esn.w_res(i, j) = 0.0;
  }
  esn.w_out.reset();
}

}  // namespace rcdenoise
