#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace rcdenoise {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Uniformly sampled multichannel time series. Row i is sampled at
/// t0 + i * dt; columns are named by `channel_names`.
struct Trajectory {
  double t0 = 0.0;
  double dt = 1.0;
  Matrix values;
  std::vector<std::string> channel_names;

  Trajectory() = default;
  Trajectory(double t0_, double dt_, Matrix values_, std::vector<std::string> names);

  [[nodiscard]] std::size_t rows() const noexcept { return static_cast<std::size_t>(values.rows()); }
  [[nodiscard]] std::size_t channels() const noexcept { return static_cast<std::size_t>(values.cols()); }
  [[nodiscard]] double time(std::size_t i) const noexcept { return t0 + static_cast<double>(i) * dt; }
  [[nodiscard]] bool empty() const noexcept { return values.rows() == 0; }

  /// Throws InvalidArgument when dt, labels or entries break the invariants.
  void validate() const;

  /// Index of a named channel; throws when absent.
  [[nodiscard]] std::size_t channel_index(std::string_view name) const;
  [[nodiscard]] bool has_channel(std::string_view name) const noexcept;

  [[nodiscard]] Trajectory select(std::span<const std::string> names) const;
  /// Rows [begin, end), with t0 shifted so the time grid is preserved.
  [[nodiscard]] Trajectory slice(std::size_t begin, std::size_t end) const;
};

/// Throws unless both trajectories share row count, dt and channel labels.
void require_aligned(const Trajectory& a, const Trajectory& b, std::string_view what);

/// Root mean square of every entry.
[[nodiscard]] double rms(const Eigen::Ref<const Matrix>& m);

}  // namespace rcdenoise
