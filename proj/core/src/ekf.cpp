#include "rcdenoise/ekf.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "rcdenoise/csv.hpp"
#include "rcdenoise/error.hpp"
#include "rcdenoise/training.hpp"

namespace rcdenoise {

void StateSpaceModel::validate() const {
  require(static_cast<bool>(transition) && static_cast<bool>(observation), "state-space model needs g and h");
  require(Q.rows() == Q.cols() && Q.rows() > 0, "Q must be square and non-empty");
  require(R.rows() == R.cols() && R.rows() > 0, "R must be square and non-empty");
  require(Q.isApprox(Q.transpose()) || Q.isZero(), "Q must be symmetric");
  require(R.isApprox(R.transpose()), "R must be symmetric");
  if (mode == JacobianMode::Analytic)
    require(static_cast<bool>(transition_jacobian) && static_cast<bool>(observation_jacobian),
            "analytic mode needs both Jacobians");
  else
    require(eps > 0.0, "finite-difference eps must be positive");
}

Matrix numerical_jacobian(const VectorMap& fn, const Vector& x, const Vector& u, double eps, bool relative) {
  require(eps > 0.0, "numerical_jacobian: eps must be positive");
  Matrix jac;
  Vector xp = x;
  Vector xm = x;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const double h = relative ? eps * (std::abs(x[j]) + 1.0) : eps;
    xp[j] = x[j] + h;
    xm[j] = x[j] - h;
    const Vector fp = fn(xp, u);
    const Vector fm = fn(xm, u);
    if (!fp.allFinite() || !fm.allFinite()) fail(ErrorKind::Instability, "numerical_jacobian: non-finite evaluation");
    if (j == 0) jac.resize(fp.size(), x.size());
    jac.col(j) = (fp - fm) / (2.0 * h);
    xp[j] = x[j];
    xm[j] = x[j];
  }
  return jac;
}

namespace {

Matrix jacobian_of(const StateSpaceModel& m, const VectorMap& fn, const JacobianMap& analytic, const Vector& x,
                   const Vector& u) {
  if (m.mode == JacobianMode::Analytic) return analytic(x, u);
  return numerical_jacobian(fn, x, u, m.eps, true);
}

}  // namespace

EkfStep ekf_update(const StateSpaceModel& model, const FilterState& prior, const Vector& u, const Vector& z) {
  require(z.size() == model.R.rows(), "ekf: measurement dimension does not match R");
  const Matrix H = jacobian_of(model, model.observation, model.observation_jacobian, prior.x, u);
  const Matrix PHt = prior.P * H.transpose();
  Matrix S = H * PHt + model.R;
  S = 0.5 * (S + S.transpose());
  Eigen::LLT<Matrix> llt(S);
  if (llt.info() != Eigen::Success || !S.allFinite())
    fail(ErrorKind::Singularity, "ekf: innovation covariance is not invertible");
  const Matrix K = llt.solve(PHt.transpose()).transpose();
  EkfStep out;
  out.innovation = z - model.observation(prior.x, u);
  out.innovation_cov = S;
  out.state.x = prior.x + K * out.innovation;
  Matrix P = prior.P - K * H * prior.P;
  out.state.P = 0.5 * (P + P.transpose());
  if (!out.state.x.allFinite() || !out.state.P.allFinite()) fail(ErrorKind::Instability, "ekf: non-finite estimate");
  return out;
}

EkfStep ekf_step_detailed(const StateSpaceModel& model, const FilterState& state, const Vector& u, const Vector& z) {
  require(state.x.size() == model.Q.rows() && state.P.rows() == model.Q.rows() && state.P.cols() == model.Q.rows(),
          "ekf: state dimension does not match Q");
  const Matrix F = jacobian_of(model, model.transition, model.transition_jacobian, state.x, u);
  FilterState prior;
  prior.x = model.transition(state.x, u);
  prior.P = F * state.P * F.transpose() + model.Q;
  prior.P = 0.5 * (prior.P + prior.P.transpose());
  return ekf_update(model, prior, u, z);
}

FilterState ekf_step(const StateSpaceModel& model, const FilterState& state, const Vector& u, const Vector& z) {
  return ekf_step_detailed(model, state, u, z).state;
}

EkfRun run_ekf(const StateSpaceModel& model, const Vector& x0, const Matrix& P0, const Trajectory& measurements,
               std::vector<std::string> state_names, const std::optional<Matrix>& inputs, bool track_eigenvalues) {
  model.validate();
  require(!measurements.empty(), "run_ekf: no measurements");
  require(measurements.channels() == model.measurement_dim(), "run_ekf: measurement width does not match R");
  require(state_names.size() == model.state_dim(), "run_ekf: one state name per state component");
  require(!inputs || static_cast<std::size_t>(inputs->rows()) == measurements.rows(), "run_ekf: one input row per step");
  const auto n = static_cast<Eigen::Index>(measurements.rows());
  const auto dx = static_cast<Eigen::Index>(model.state_dim());
  const auto dz = static_cast<Eigen::Index>(model.measurement_dim());

  Matrix est(n, dx);
  EkfRun out;
  out.p_diagonal.resize(n, dx);
  out.normalized_innovations.resize(n, dz);
  out.min_p_eigenvalue = std::numeric_limits<double>::infinity();
  FilterState state{x0, P0};
  for (Eigen::Index k = 0; k < n; ++k) {
    const Vector u = inputs ? Vector(inputs->row(k).transpose()) : Vector();
    const Vector z = measurements.values.row(k).transpose();
    const EkfStep s = k == 0 ? ekf_update(model, state, u, z) : ekf_step_detailed(model, state, u, z);
    state = s.state;
    est.row(k) = state.x.transpose();
    out.p_diagonal.row(k) = state.P.diagonal().transpose();
    const Eigen::LLT<Matrix> llt(s.innovation_cov);
    out.normalized_innovations.row(k) = llt.matrixL().solve(s.innovation).transpose();
    if (!(state.P - state.P.transpose()).isZero(0.0)) out.p_symmetric = false;
    if (track_eigenvalues) {
      const Eigen::SelfAdjointEigenSolver<Matrix> eig(state.P, Eigen::EigenvaluesOnly);
      out.min_p_eigenvalue = std::min(out.min_p_eigenvalue, eig.eigenvalues().minCoeff());
    }
  }
  out.estimates = Trajectory(measurements.t0, measurements.dt, std::move(est), std::move(state_names));
  return out;
}

Eigen::Matrix3d lorenz_step_jacobian(const Vec3& x, const LorenzParams& p, double dt) {
  using M3 = Eigen::Matrix3d;
  const M3 I = M3::Identity();
  const Vec3 k1 = lorenz_rhs(x, p);
  const M3 J1 = lorenz_jacobian(x, p);
  const Vec3 x2 = x + 0.5 * dt * k1;
  const Vec3 k2 = lorenz_rhs(x2, p);
  const M3 J2 = lorenz_jacobian(x2, p) * (I + 0.5 * dt * J1);
  const Vec3 x3 = x + 0.5 * dt * k2;
  const Vec3 k3 = lorenz_rhs(x3, p);
  const M3 J3 = lorenz_jacobian(x3, p) * (I + 0.5 * dt * J2);
  const Vec3 x4 = x + dt * k3;
  const M3 J4 = lorenz_jacobian(x4, p) * (I + dt * J3);
  return I + (dt / 6.0) * (J1 + 2.0 * J2 + 2.0 * J3 + J4);
}

StateSpaceModel lorenz_model(const LorenzParams& params, double dt, double q, const std::vector<std::size_t>& observed,
                             const Vector& measurement_variance, JacobianMode mode) {
  params.validate();
  require(dt > 0.0, "lorenz_model: dt must be positive");
  require(q >= 0.0, "lorenz_model: q must be non-negative");
  require(!observed.empty(), "lorenz_model: need at least one observed component");
  require(static_cast<std::size_t>(measurement_variance.size()) == observed.size(),
          "lorenz_model: one measurement variance per observed component");
  for (auto i : observed) require(i < 3, "lorenz_model: observed index out of range");
  const auto m = static_cast<Eigen::Index>(observed.size());
  Matrix H = Matrix::Zero(m, 3);
  for (Eigen::Index r = 0; r < m; ++r) H(r, static_cast<Eigen::Index>(observed[static_cast<std::size_t>(r)])) = 1.0;

  StateSpaceModel model;
  model.transition = [params, dt](const Vector& x, const Vector&) -> Vector {
    return lorenz_step(Vec3(x), params, dt);
  };
  model.observation = [H](const Vector& x, const Vector&) -> Vector { return H * x; };
  model.transition_jacobian = [params, dt](const Vector& x, const Vector&) -> Matrix {
    return lorenz_step_jacobian(Vec3(x), params, dt);
  };
  model.observation_jacobian = [H](const Vector&, const Vector&) -> Matrix { return H; };
  model.Q = q * Matrix::Identity(3, 3);
  model.R = measurement_variance.asDiagonal();
  model.mode = mode;
  return model;
}

std::vector<double> default_q_grid() {
  std::vector<double> grid;
  for (int e = -6; e <= 0; ++e) grid.push_back(std::pow(10.0, e));
  return grid;
}

EkfTuning tune_lorenz_ekf(const LorenzParams& params, const Trajectory& measurements, const Trajectory& truth,
                          const Vector& measurement_variance, std::size_t score_begin, std::size_t score_end,
                          const std::vector<double>& q_grid) {
  require(!q_grid.empty(), "tune_lorenz_ekf: empty q grid");
  require(truth.rows() == measurements.rows(), "tune_lorenz_ekf: truth and measurements must share the grid");
  require(score_begin < score_end && score_end <= truth.rows(), "tune_lorenz_ekf: scored rows out of range");
  std::vector<std::size_t> observed;
  for (const auto& name : measurements.channel_names) observed.push_back(truth.channel_index(name));
  std::vector<std::string> names = truth.channel_names;
  require(names.size() == 3, "tune_lorenz_ekf: truth must hold x, y, z");

  EkfTuning best;
  best.nmse = std::numeric_limits<double>::infinity();
  best.grid = q_grid;
  const auto b = static_cast<Eigen::Index>(score_begin);
  const auto len = static_cast<Eigen::Index>(score_end - score_begin);
  for (double q : q_grid) {
    double score = std::numeric_limits<double>::infinity();
    try {
      const auto model = lorenz_model(params, measurements.dt, q, observed, measurement_variance);
      auto run = run_ekf(model, params.initial_state(), Matrix::Identity(3, 3), measurements, names);
      score = nmse(run.estimates.values.middleRows(b, len), truth.values.middleRows(b, len));
      if (score < best.nmse) {
        best.q = q;
        best.nmse = score;
        best.run = std::move(run);
      }
    } catch (const Error& e) {
      if (!e.is_numeric()) throw;
    }
    best.grid_nmse.push_back(score);
  }
  if (!std::isfinite(best.nmse)) fail(ErrorKind::NoFeasiblePoint, "tune_lorenz_ekf: the filter failed for every q");
  return best;
}

void write_estimates(const std::filesystem::path& path, const EkfRun& run) {
  const auto& est = run.estimates;
  std::vector<std::string> header{"t"};
  for (const auto& n : est.channel_names) header.push_back(n + "_est");
  for (const auto& n : est.channel_names) header.push_back("P_" + n);
  csv::Table table(std::move(header));
  for (std::size_t i = 0; i < est.rows(); ++i) {
    std::vector<std::string> row{csv::format_double(est.time(i))};
    const auto r = static_cast<Eigen::Index>(i);
    for (Eigen::Index c = 0; c < est.values.cols(); ++c) row.push_back(csv::format_double(est.values(r, c)));
    for (Eigen::Index c = 0; c < run.p_diagonal.cols(); ++c) row.push_back(csv::format_double(run.p_diagonal(r, c)));
    table.add_row(std::move(row));
  }
  table.write(path);
}

}  // namespace rcdenoise
