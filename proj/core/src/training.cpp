#include "rcdenoise/training.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "rcdenoise/error.hpp"

namespace rcdenoise {

std::vector<double> default_lambda_grid() {
  std::vector<double> grid;
  for (int e = -15; e <= 20; ++e) grid.push_back(std::pow(10.0, e));
  return grid;
}

void RidgeConfig::validate() const {
  if (fixed_lambda) require(std::isfinite(*fixed_lambda) && *fixed_lambda >= 0.0, "fixed lambda must be >= 0");
  require(!lambda_grid.empty(), "lambda grid must not be empty");
  for (std::size_t i = 0; i < lambda_grid.size(); ++i) {
    require(std::isfinite(lambda_grid[i]) && lambda_grid[i] >= 0.0, "lambda grid values must be >= 0");
    if (i > 0) require(lambda_grid[i] > lambda_grid[i - 1], "lambda grid must be strictly increasing");
  }
  require(folds >= 2, "cross-validation needs at least 2 folds");
}

namespace {

// Solve (G + lambda I) W = B for symmetric G, through eigh when Cholesky breaks
// down on a numerically indefinite G with tiny lambda.
Matrix solve_spectral(const Matrix& gram, const Matrix& rhs, double lambda) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(gram);
  const Vector s = eig.eigenvalues().cwiseMax(0.0).array() + lambda;
  const double tol = std::numeric_limits<double>::epsilon() * static_cast<double>(gram.rows()) * s.maxCoeff();
  Matrix coeff = eig.eigenvectors().transpose() * rhs;
  for (Eigen::Index k = 0; k < coeff.rows(); ++k) coeff.row(k) *= s[k] > tol ? 1.0 / s[k] : 0.0;
  return eig.eigenvectors() * coeff;
}

}  // namespace

Matrix ridge_fit(const Eigen::Ref<const Matrix>& states, const Eigen::Ref<const Matrix>& targets, double lambda) {
  require(states.rows() == targets.rows(), "ridge_fit: state and target row counts differ");
  require(states.rows() >= 1, "ridge_fit: no rows");
  require(std::isfinite(lambda) && lambda >= 0.0, "ridge_fit: lambda must be >= 0");
  require(states.allFinite() && targets.allFinite(), "ridge_fit: non-finite data");

  const auto n = states.cols();
  Matrix gram = Matrix::Zero(n, n);
  gram.selfadjointView<Eigen::Lower>().rankUpdate(states.transpose());
  gram = gram.selfadjointView<Eigen::Lower>();
  gram.diagonal().array() += lambda;
  const Matrix rhs = states.transpose() * targets;

  Eigen::LLT<Matrix> llt(gram);
  if (llt.info() == Eigen::Success) {
    const Vector diag = llt.matrixLLT().diagonal();
    const double ratio = diag.minCoeff() / diag.maxCoeff();
    // A Cholesky pivot this small means the unregularized system is singular to working precision.
    if (!(lambda == 0.0 && ratio * ratio < std::numeric_limits<double>::epsilon() * static_cast<double>(n)))
      return llt.solve(rhs);
  }
  if (lambda == 0.0)
    fail(ErrorKind::RankDeficiency, "ridge_fit: R^T R is singular with lambda = 0; use lambda > 0");
  return solve_spectral(gram - lambda * Matrix::Identity(n, n), rhs, lambda);
}

LambdaSelection select_lambda(const Eigen::Ref<const Matrix>& states, const Eigen::Ref<const Matrix>& targets,
                              const RidgeConfig& config) {
  config.validate();
  require(states.rows() == targets.rows(), "select_lambda: state and target row counts differ");
  const auto rows = states.rows();
  const auto k = static_cast<Eigen::Index>(config.folds);
  require(rows >= 2 * k, "select_lambda: not enough rows for the requested folds");

  LambdaSelection out;
  out.grid = config.lambda_grid;
  const auto g = static_cast<Eigen::Index>(out.grid.size());
  out.fold_scores.resize(g, k);

  const auto n = states.cols();
  std::vector<Eigen::Index> bounds(static_cast<std::size_t>(k + 1));
  for (Eigen::Index f = 0; f <= k; ++f) bounds[static_cast<std::size_t>(f)] = f * rows / k;

  std::vector<Matrix> fold_gram(static_cast<std::size_t>(k));
  std::vector<Matrix> fold_rhs(static_cast<std::size_t>(k));
  for (Eigen::Index f = 0; f < k; ++f) {
    const auto b = bounds[static_cast<std::size_t>(f)];
    const auto len = bounds[static_cast<std::size_t>(f + 1)] - b;
    auto block = states.middleRows(b, len);
    Matrix gram = Matrix::Zero(n, n);
    gram.selfadjointView<Eigen::Lower>().rankUpdate(block.transpose());
    fold_gram[static_cast<std::size_t>(f)] = gram.selfadjointView<Eigen::Lower>();
    fold_rhs[static_cast<std::size_t>(f)] = block.transpose() * targets.middleRows(b, len);
  }

  for (Eigen::Index f = 0; f < k; ++f) {
    Matrix gram = Matrix::Zero(n, n);
    Matrix rhs = Matrix::Zero(n, targets.cols());
    for (Eigen::Index o = 0; o < k; ++o) {
      if (o == f) continue;
      gram += fold_gram[static_cast<std::size_t>(o)];
      rhs += fold_rhs[static_cast<std::size_t>(o)];
    }
    // One eigendecomposition per fold serves the whole lambda grid.
    Eigen::SelfAdjointEigenSolver<Matrix> eig(gram);
    const Vector s = eig.eigenvalues().cwiseMax(0.0);
    const Matrix coeff = eig.eigenvectors().transpose() * rhs;
    const auto b = bounds[static_cast<std::size_t>(f)];
    const auto len = bounds[static_cast<std::size_t>(f + 1)] - b;
    const Matrix held_proj = states.middleRows(b, len) * eig.eigenvectors();
    const auto held_y = targets.middleRows(b, len);
    const double denom = held_y.squaredNorm();
    if (!(denom > 0.0)) fail(ErrorKind::DegenerateSignal, "select_lambda: held-out fold has zero-norm targets");

    const double tol_base = std::numeric_limits<double>::epsilon() * static_cast<double>(n);
    for (Eigen::Index gi = 0; gi < g; ++gi) {
      const double lambda = out.grid[static_cast<std::size_t>(gi)];
      const Vector shifted = s.array() + lambda;
      const double tol = tol_base * shifted.maxCoeff();
      Matrix scaled = coeff;
      for (Eigen::Index r = 0; r < scaled.rows(); ++r) scaled.row(r) *= shifted[r] > tol ? 1.0 / shifted[r] : 0.0;
      out.fold_scores(gi, f) = (held_y - held_proj * scaled).squaredNorm() / denom;
    }
  }

  out.cv_scores.resize(static_cast<std::size_t>(g));
  double best = std::numeric_limits<double>::infinity();
  std::size_t best_index = 0;
  for (Eigen::Index gi = 0; gi < g; ++gi) {
    const double score = out.fold_scores.row(gi).mean();
    out.cv_scores[static_cast<std::size_t>(gi)] = score;
    if (std::isfinite(score) && score <= best) {
      best = score;
      best_index = static_cast<std::size_t>(gi);
    }
  }
  out.lambda = out.grid[best_index];
  return out;
}

double nmse(const Eigen::Ref<const Matrix>& prediction, const Eigen::Ref<const Matrix>& truth) {
  require(prediction.rows() == truth.rows() && prediction.cols() == truth.cols(), "nmse: shape mismatch");
  const double denom = truth.squaredNorm();
  if (!(denom > 0.0)) fail(ErrorKind::DegenerateSignal, "nmse: truth has zero norm");
  return (prediction - truth).squaredNorm() / denom;
}

double nmse(const Trajectory& prediction, const Trajectory& truth) {
  require_aligned(prediction, truth, "nmse");
  return nmse(prediction.values, truth.values);
}

Matrix readout(const EchoStateNetwork& esn, const Eigen::Ref<const Matrix>& states) {
  if (!esn.w_out) fail(ErrorKind::State, "readout requested from an untrained network");
  require(states.cols() == esn.w_out->rows(), "readout: state width does not match w_out");
  return esn.output_scaling.denormalize(states * *esn.w_out);
}

Prediction predict(const EchoStateNetwork& esn, const Trajectory& inputs) {
  if (!esn.w_out) fail(ErrorKind::State, "predict called on an untrained network");
  require(!inputs.empty(), "predict: empty input");
  const Matrix states = run(esn, inputs);
  Prediction out;
  out.output.t0 = inputs.t0;
  out.output.dt = inputs.dt;
  out.output.values = readout(esn, states);
  out.output.channel_names = esn.output_channels;
  if (out.output.channel_names.empty())
    for (std::size_t c = 0; c < esn.output_dim(); ++c) out.output.channel_names.push_back("y" + std::to_string(c));
  out.washout_rows = std::min(esn.washout(), inputs.rows());
  return out;
}

}  // namespace rcdenoise
