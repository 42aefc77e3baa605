#pragma once

#include <optional>
#include <vector>

#include "rcdenoise/reservoir.hpp"
#include "rcdenoise/trajectory.hpp"

namespace rcdenoise {

/// Powers of ten 1e-15, 1e-14, ..., 1e20.
[[nodiscard]] std::vector<double> default_lambda_grid();

struct RidgeConfig {
  /// When set, cross-validation is skipped and this value is used directly.
  std::optional<double> fixed_lambda;
  std::vector<double> lambda_grid = default_lambda_grid();
  std::size_t folds = 5;

  void validate() const;
};

/// W = (R^T R + lambda I)^{-1} R^T Y through a Cholesky solve.
/// Throws RankDeficiency when lambda == 0 and R^T R is singular.
[[nodiscard]] Matrix ridge_fit(const Eigen::Ref<const Matrix>& states, const Eigen::Ref<const Matrix>& targets,
                               double lambda);

struct LambdaSelection {
  double lambda = 0.0;
  std::vector<double> grid;
  std::vector<double> cv_scores;  // mean held-out NMSE per grid point
  Matrix fold_scores;             // grid x folds
};

/// Contiguous-block k-fold cross-validation over rows; ties go to the larger lambda.
[[nodiscard]] LambdaSelection select_lambda(const Eigen::Ref<const Matrix>& states,
                                            const Eigen::Ref<const Matrix>& targets, const RidgeConfig& config);

/// ||prediction - truth||^2 / ||truth||^2 over all entries jointly.
[[nodiscard]] double nmse(const Eigen::Ref<const Matrix>& prediction, const Eigen::Ref<const Matrix>& truth);
[[nodiscard]] double nmse(const Trajectory& prediction, const Trajectory& truth);

struct Prediction {
  Trajectory output;
  /// Leading rows still inside the reservoir transient.
  std::size_t washout_rows = 0;
};

/// Runs the reservoir from the zero state and applies the readout on every row.
[[nodiscard]] Prediction predict(const EchoStateNetwork& esn, const Trajectory& inputs);

/// Readout applied to precomputed states (with output de-normalization).
[[nodiscard]] Matrix readout(const EchoStateNetwork& esn, const Eigen::Ref<const Matrix>& states);

}  // namespace rcdenoise
