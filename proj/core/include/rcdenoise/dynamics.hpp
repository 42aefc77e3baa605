#pragma once

#include <vector>

#include <Eigen/Dense>

#include "rcdenoise/trajectory.hpp"

namespace rcdenoise {

using Vec3 = Eigen::Vector3d;

/// Magnitude above which a generated state is treated as divergent.
inline constexpr double kBlowupThreshold = 1e6;

struct LorenzParams {
  double sigma = 10.0;
  double rho = 28.0;
  double beta = 8.0 / 3.0;
  double x0 = 1.0;
  double y0 = 1.0;
  double z0 = 1.0;

  void validate() const;
  [[nodiscard]] Vec3 initial_state() const { return {x0, y0, z0}; }
};

[[nodiscard]] Vec3 lorenz_rhs(const Vec3& state, const LorenzParams& params);
[[nodiscard]] Eigen::Matrix3d lorenz_jacobian(const Vec3& state, const LorenzParams& params);

/// Classical fourth-order Runge-Kutta step for an autonomous system x' = f(x).
template <class State, class Rhs>
[[nodiscard]] State rk4_step(const Rhs& f, const State& x, double dt) {
  const State k1 = f(x);
  const State k2 = f(State(x + 0.5 * dt * k1));
  const State k3 = f(State(x + 0.5 * dt * k2));
  const State k4 = f(State(x + dt * k3));
  return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

[[nodiscard]] Vec3 lorenz_step(const Vec3& state, const LorenzParams& params, double dt);

/// Fixed-step RK4 trajectory with floor(duration/dt)+1 rows and channels x, y, z.
[[nodiscard]] Trajectory integrate_lorenz(const LorenzParams& params, double dt, double duration);

/// Adaptive exponential integrate-and-fire parameters. Units: ms, mV, MOhm,
/// nS, pA. R*I in MOhm*pA is converted to mV by a factor of 1e-3.
struct AdExParams {
  double tau_m = 5.0;
  double tau_w = 100.0;
  double C = 1.0;
  double R = 500.0;
  double V_r = -55.0;
  double V_T = -51.0;
  /// Printed as -2 mV in the source model; that sign has no resting state
  /// and diverges within a millisecond, so the default uses +2 mV.
  double Delta_T = 2.0;
  double a = -0.5;
  double b = 7.0;
  double V0 = -55.0;
  double w0 = 0.0;

  void validate() const;

  /// The parameter set with Delta_T taken literally as -2 mV.
  [[nodiscard]] static AdExParams literal();
};

struct CurrentProfile {
  double onset = 10.0;
  double duration = 390.0;
  double amplitude = 65.0;

  [[nodiscard]] double at(double t) const noexcept {
    return (t >= onset && t < onset + duration) ? amplitude : 0.0;
  }
};

/// Continuous part of the AdEx vector field: (dV/dt, dw/dt) in mV/ms, pA/ms.
[[nodiscard]] Eigen::Vector2d adex_rhs(double V, double w, double current, const AdExParams& params);

struct AdexRun {
  Trajectory trajectory;            // channels V, w
  std::vector<double> spike_times;  // ms
  /// Sum of the spike-triggered increments applied to w.
  double adaptation_jumps = 0.0;
};

/// Forward-Euler integration with threshold-reset spikes. After every step
/// with V > V_T the voltage is reset to V_r and w jumps by b.
[[nodiscard]] AdexRun integrate_adex(const AdExParams& params, const CurrentProfile& input, double dt,
                                     double duration);

}  // namespace rcdenoise
