#include "rcdenoise/dynamics.hpp"

#include <cmath>
#include <string>

#include "rcdenoise/error.hpp"

namespace rcdenoise {

namespace {

std::size_t step_count(double dt, double duration) {
  require(std::isfinite(dt) && dt > 0.0, "dt must be positive");
  require(std::isfinite(duration) && duration >= dt, "duration must be at least dt");
  // Guard against 50/0.005 evaluating to 9999.999...
  return static_cast<std::size_t>(std::floor(duration / dt + 1e-9));
}

void check_blowup(const auto& state, double t) {
  if (!state.allFinite() || state.cwiseAbs().maxCoeff() > kBlowupThreshold)
    fail(ErrorKind::IntegrationBlowup, "state diverged at t=" + std::to_string(t));
}

}  // namespace

void LorenzParams::validate() const {
  require(std::isfinite(sigma) && std::isfinite(rho) && std::isfinite(beta), "Lorenz parameters must be finite");
  require(std::isfinite(x0) && std::isfinite(y0) && std::isfinite(z0), "Lorenz initial state must be finite");
  require(beta > 0.0, "Lorenz beta must be positive");
}

Vec3 lorenz_rhs(const Vec3& s, const LorenzParams& p) {
  require(s.allFinite(), "lorenz_rhs: non-finite state");
  return {p.sigma * (s.y() - s.x()), s.x() * (p.rho - s.z()) - s.y(), s.x() * s.y() - p.beta * s.z()};
}

Eigen::Matrix3d lorenz_jacobian(const Vec3& s, const LorenzParams& p) {
  Eigen::Matrix3d j;
  j << -p.sigma, p.sigma, 0.0,
       p.rho - s.z(), -1.0, -s.x(),
       s.y(), s.x(), -p.beta;
  return j;
}

Vec3 lorenz_step(const Vec3& state, const LorenzParams& params, double dt) {
  return rk4_step([&params](const Vec3& x) { return lorenz_rhs(x, params); }, state, dt);
}

Trajectory integrate_lorenz(const LorenzParams& params, double dt, double duration) {
  params.validate();
  const std::size_t steps = step_count(dt, duration);
  Matrix values(static_cast<Eigen::Index>(steps + 1), 3);
  Vec3 state = params.initial_state();
  values.row(0) = state.transpose();
  for (std::size_t i = 1; i <= steps; ++i) {
    state = lorenz_step(state, params, dt);
    check_blowup(state, static_cast<double>(i) * dt);
    values.row(static_cast<Eigen::Index>(i)) = state.transpose();
  }
  return Trajectory(0.0, dt, std::move(values), {"x", "y", "z"});
}

void AdExParams::validate() const {
  require(tau_m > 0.0, "AdEx tau_m must be positive");
  require(tau_w > 0.0, "AdEx tau_w must be positive");
  require(R != 0.0, "AdEx R must be nonzero");
  require(C != 0.0, "AdEx C must be nonzero");
  require(Delta_T != 0.0, "AdEx Delta_T must be nonzero");
  require(std::isfinite(V_r) && std::isfinite(V_T) && std::isfinite(a) && std::isfinite(b) &&
              std::isfinite(V0) && std::isfinite(w0),
          "AdEx parameters must be finite");
}

AdExParams AdExParams::literal() {
  AdExParams p;
  p.Delta_T = -2.0;
  return p;
}

Eigen::Vector2d adex_rhs(double V, double w, double current, const AdExParams& p) {
  constexpr double kMOhmPicoampToMillivolt = 1e-3;
  const double drive = -(V - p.V_r) + p.Delta_T * std::exp((V - p.V_T) / p.Delta_T) -
                       kMOhmPicoampToMillivolt * p.R * w + kMOhmPicoampToMillivolt * p.R * current;
  return {drive / (p.tau_m * p.C), (p.a * (V - p.V_r) - w) / p.tau_w};
}

AdexRun integrate_adex(const AdExParams& params, const CurrentProfile& input, double dt, double duration) {
  params.validate();
  require(input.duration >= 0.0, "current duration must be non-negative");
  const std::size_t steps = step_count(dt, duration);

  AdexRun run;
  Matrix values(static_cast<Eigen::Index>(steps + 1), 2);
  Eigen::Vector2d state(params.V0, params.w0);
  values.row(0) = state.transpose();
  for (std::size_t i = 0; i < steps; ++i) {
    const double t = static_cast<double>(i) * dt;
    state += dt * adex_rhs(state[0], state[1], input.at(t), params);
    const double t_next = static_cast<double>(i + 1) * dt;
    check_blowup(state, t_next);
    if (state[0] > params.V_T) {
      run.spike_times.push_back(t_next);
      state[0] = params.V_r;
      state[1] += params.b;
      run.adaptation_jumps += params.b;
    }
    values.row(static_cast<Eigen::Index>(i + 1)) = state.transpose();
  }
  run.trajectory = Trajectory(0.0, dt, std::move(values), {"V", "w"});
  return run;
}

}  // namespace rcdenoise
