#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "rcdenoise/dynamics.hpp"
#include "rcdenoise/trajectory.hpp"

namespace rcdenoise {

using VectorMap = std::function<Vector(const Vector& x, const Vector& u)>;
using JacobianMap = std::function<Matrix(const Vector& x, const Vector& u)>;

enum class JacobianMode { Analytic, FiniteDifference };

/// x_k = g(x_{k-1}, u) + process noise (cov Q); z_k = h(x_k, u) + measurement noise (cov R).
struct StateSpaceModel {
  VectorMap transition;
  VectorMap observation;
  JacobianMap transition_jacobian;   // required in Analytic mode
  JacobianMap observation_jacobian;  // required in Analytic mode
  Matrix Q;
  Matrix R;
  JacobianMode mode = JacobianMode::FiniteDifference;
  /// Finite-difference step relative to |x_j| + 1.
  double eps = 1e-6;

  [[nodiscard]] std::size_t state_dim() const noexcept { return static_cast<std::size_t>(Q.rows()); }
  [[nodiscard]] std::size_t measurement_dim() const noexcept { return static_cast<std::size_t>(R.rows()); }
  void validate() const;
};

struct FilterState {
  Vector x;
  Matrix P;
};

/// Central differences, column j = (fn(x + h e_j) - fn(x - h e_j)) / 2h with
/// h = eps, or h = eps (|x_j| + 1) when `relative` is set.
[[nodiscard]] Matrix numerical_jacobian(const VectorMap& fn, const Vector& x, const Vector& u, double eps,
                                        bool relative = false);

struct EkfStep {
  FilterState state;
  Vector innovation;
  Matrix innovation_cov;
};

/// Predict through g, then update with measurement z.
[[nodiscard]] EkfStep ekf_step_detailed(const StateSpaceModel& model, const FilterState& state, const Vector& u,
                                        const Vector& z);
[[nodiscard]] FilterState ekf_step(const StateSpaceModel& model, const FilterState& state, const Vector& u,
                                   const Vector& z);
/// Measurement update only (no prediction).
[[nodiscard]] EkfStep ekf_update(const StateSpaceModel& model, const FilterState& prior, const Vector& u,
                                 const Vector& z);

struct EkfRun {
  Trajectory estimates;           // x_{k|k}, one row per measurement
  Matrix p_diagonal;              // diag(P_{k|k}) per row
  Matrix normalized_innovations;  // S^{-1/2}-whitened innovations per row
  double min_p_eigenvalue = 0.0;  // smallest eigenvalue of any P_{k|k}
  bool p_symmetric = true;
};

/// The first measurement updates the prior (x0, P0) directly; each later row
/// is a predict/update step. `inputs`, when given, supplies u per row.
[[nodiscard]] EkfRun run_ekf(const StateSpaceModel& model, const Vector& x0, const Matrix& P0,
                             const Trajectory& measurements, std::vector<std::string> state_names,
                             const std::optional<Matrix>& inputs = std::nullopt, bool track_eigenvalues = false);

/// Jacobian of one RK4 step of the Lorenz flow, by differentiating the stages.
[[nodiscard]] Eigen::Matrix3d lorenz_step_jacobian(const Vec3& x, const LorenzParams& params, double dt);

/// Lorenz plant with g = one RK4 step, h selecting `observed` state indices,
/// Q = q I and R = diag(measurement_variance).
[[nodiscard]] StateSpaceModel lorenz_model(const LorenzParams& params, double dt, double q,
                                           const std::vector<std::size_t>& observed,
                                           const Vector& measurement_variance,
                                           JacobianMode mode = JacobianMode::FiniteDifference);

[[nodiscard]] std::vector<double> default_q_grid();

struct EkfTuning {
  double q = 0.0;
  double nmse = 0.0;              // on the scored rows
  std::vector<double> grid;
  std::vector<double> grid_nmse;  // +inf where the filter failed
  EkfRun run;
};

/// Runs the Lorenz EKF for every q in the grid and keeps the one with the
/// lowest NMSE against `truth` on rows [score_begin, score_end).
[[nodiscard]] EkfTuning tune_lorenz_ekf(const LorenzParams& params, const Trajectory& measurements,
                                        const Trajectory& truth, const Vector& measurement_variance,
                                        std::size_t score_begin, std::size_t score_end,
                                        const std::vector<double>& q_grid = default_q_grid());

/// `t,<state>_est...,P_<state>...`.
void write_estimates(const std::filesystem::path& path, const EkfRun& run);

}  // namespace rcdenoise
