#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rcdenoise/trajectory.hpp"

namespace rcdenoise {

/// The searchable reservoir tuple (N, alpha, gamma, zeta, p).
struct HyperParams {
  std::size_t n_nodes = 100;
  double leakage = 1.0;          // alpha
  double spectral_radius = 0.9;  // gamma
  double input_scaling = 1.0;    // zeta
  double connectivity = 0.3;     // p

  /// Physical validity only (alpha in [0,1], gamma >= 0, ...). Search
  /// bounds are enforced by the optimizer's SearchSpace.
  void validate() const;
  friend bool operator==(const HyperParams&, const HyperParams&) = default;
};

/// Construction choices that are not part of the searched tuple.
struct ReservoirOptions {
  double bias_constant = 0.0;       // added to every node
  double bias_scale = 0.0;          // plus Uniform(-bias_scale, bias_scale) per node
  double input_connectivity = 1.0;  // fraction of nodes wired to the inputs
  std::size_t washout = 100;        // leading rows excluded from readout fitting
  friend bool operator==(const ReservoirOptions&, const ReservoirOptions&) = default;
};

/// Affine per-channel map x -> (x - offset) / scale.
struct ChannelScaling {
  Vector offset;
  Vector scale;

  [[nodiscard]] static ChannelScaling identity(std::size_t channels);
  [[nodiscard]] bool empty() const noexcept { return offset.size() == 0; }
  [[nodiscard]] Matrix normalize(const Eigen::Ref<const Matrix>& x) const;
  [[nodiscard]] Matrix denormalize(const Eigen::Ref<const Matrix>& x) const;
};

using EdgeMask = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

/// Echo state network. w_res(i, j) is the weight of the edge j -> i; `edges`
/// marks which entries are structural edges (a masked-out entry is always 0).
struct EchoStateNetwork {
  HyperParams hyper;
  ReservoirOptions options;
  std::uint64_t seed = 0;

  Matrix w_res;
  Matrix w_in;    // N x d_in
  Vector bias;    // N
  EdgeMask edges;
  std::optional<Matrix> w_out;  // N x d_out once trained
  double ridge_lambda = 0.0;

  std::vector<std::string> input_channels;
  std::vector<std::string> output_channels;
  ChannelScaling input_scaling;
  ChannelScaling output_scaling;

  [[nodiscard]] std::size_t n_nodes() const noexcept { return static_cast<std::size_t>(w_res.rows()); }
  [[nodiscard]] std::size_t input_dim() const noexcept { return static_cast<std::size_t>(w_in.cols()); }
  [[nodiscard]] std::size_t output_dim() const noexcept { return w_out ? static_cast<std::size_t>(w_out->cols()) : 0; }
  [[nodiscard]] bool trained() const noexcept { return w_out.has_value(); }
  [[nodiscard]] std::size_t edge_count() const noexcept { return static_cast<std::size_t>(edges.count()); }
  [[nodiscard]] std::size_t washout() const noexcept { return options.washout; }

  /// Shape and invariant checks; throws InvalidArgument.
  void validate() const;
};

/// Largest eigenvalue modulus of a square matrix.
[[nodiscard]] double spectral_radius(const Eigen::Ref<const Matrix>& m);

/// Scales w_res so that its spectral radius equals hyper.spectral_radius.
/// Throws DegenerateTopology when the current radius is zero.
void restore_spectral_radius(EchoStateNetwork& esn);

/// Erdos-Renyi reservoir without self-loops, Uniform(-1,1) edge weights
/// rescaled to spectral radius gamma; dense Uniform(-zeta, zeta) input weights.
[[nodiscard]] EchoStateNetwork build_reservoir(const HyperParams& hyper, std::size_t input_dim, std::uint64_t seed,
                                               const ReservoirOptions& options = {});

/// One leaky-tanh update (1-a) r + a tanh(W_res r + W_in u + b) in network units.
[[nodiscard]] Vector step(const EchoStateNetwork& esn, const Eigen::Ref<const Vector>& r,
                          const Eigen::Ref<const Vector>& u);

/// Drives the reservoir over rows of `inputs` (after input_scaling, when set)
/// and returns the state matrix, one row per input row.
[[nodiscard]] Matrix run(const EchoStateNetwork& esn, const Eigen::Ref<const Matrix>& inputs,
                         const std::optional<Vector>& r0 = std::nullopt);
[[nodiscard]] Matrix run(const EchoStateNetwork& esn, const Trajectory& inputs,
                         const std::optional<Vector>& r0 = std::nullopt);

/// Structural edits used by pruning and growth. They keep w_res, w_in, bias
/// and the edge mask consistent but do not restore the spectral radius.
void remove_nodes(EchoStateNetwork& esn, std::vector<std::size_t> nodes);
void remove_edges(EchoStateNetwork& esn, const std::vector<std::pair<std::size_t, std::size_t>>& edges);

}  // namespace rcdenoise
