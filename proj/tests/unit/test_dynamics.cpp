#include <gtest/gtest.h>

#include <cmath>

#include "rcdenoise/dynamics.hpp"
#include "rcdenoise/error.hpp"

using namespace rcdenoise;

namespace {

template <class Fn>
ErrorKind kind_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected an rcdenoise::Error";
  return ErrorKind::InvalidArgument;
}

}  // namespace

TEST(Lorenz, RhsAtOriginIsZero) {
  EXPECT_EQ(lorenz_rhs({0, 0, 0}, {}), Vec3::Zero());
}

TEST(Lorenz, RhsAtOnesMatchesHandSubstitution) {
  const Vec3 d = lorenz_rhs({1, 1, 1}, {});
  EXPECT_DOUBLE_EQ(d.x(), 0.0);
  EXPECT_DOUBLE_EQ(d.y(), 26.0);
  EXPECT_NEAR(d.z(), -5.0 / 3.0, 1e-15);
}

TEST(Lorenz, RhsVanishesAtNontrivialEquilibrium) {
  const LorenzParams p;
  const double c = std::sqrt(p.beta * (p.rho - 1.0));
  EXPECT_LT(lorenz_rhs({c, c, p.rho - 1.0}, p).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Lorenz, RhsRejectsNonFiniteState) {
  EXPECT_EQ(kind_of([] { (void)lorenz_rhs({NAN, 0, 0}, {}); }), ErrorKind::InvalidArgument);
}

TEST(Lorenz, DefaultRecordingShape) {
  const Trajectory t = integrate_lorenz({}, 0.005, 50.0);
  EXPECT_EQ(t.rows(), 10001u);
  ASSERT_EQ(t.channels(), 3u);
  EXPECT_EQ(t.channel_names, (std::vector<std::string>{"x", "y", "z"}));
  EXPECT_EQ(t.values.row(0), Eigen::RowVector3d(1, 1, 1));
  EXPECT_NO_THROW(t.validate());
}

TEST(Lorenz, OriginWithZeroParametersStaysAtZero) {
  LorenzParams p{0.0, 0.0, 1.0, 0.0, 0.0, 0.0};
  const Trajectory t = integrate_lorenz(p, 0.01, 5.0);
  EXPECT_EQ(t.values.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Lorenz, DivergenceRaisesBlowup) {
  // Negative damping makes x and y grow without bound.
  LorenzParams p{-10.0, 28.0, 8.0 / 3.0, 1.0, 1.0, 1.0};
  EXPECT_EQ(kind_of([&] { (void)integrate_lorenz(p, 0.01, 50.0); }), ErrorKind::IntegrationBlowup);
}

TEST(Lorenz, RejectsBadGrid) {
  EXPECT_EQ(kind_of([] { (void)integrate_lorenz({}, 0.0, 1.0); }), ErrorKind::InvalidArgument);
  EXPECT_EQ(kind_of([] { (void)integrate_lorenz({}, 0.1, 0.05); }), ErrorKind::InvalidArgument);
}

TEST(Rk4, LinearDecayMatchesExponential) {
  Eigen::Matrix<double, 1, 1> x;
  x << 1.0;
  auto f = [](const Eigen::Matrix<double, 1, 1>& s) -> Eigen::Matrix<double, 1, 1> { return -s; };
  for (int i = 0; i < 10; ++i) x = rk4_step(f, x, 0.1);
  EXPECT_NEAR(x(0), std::exp(-1.0), 1e-6);
}

TEST(Rk4, HalvingStepCutsErrorSixteenfold) {
  const LorenzParams p;
  const double dense_dt = 1e-4;
  auto run = [&](double dt) {
    Vec3 s = p.initial_state();
    const int n = static_cast<int>(std::lround(0.5 / dt));
    for (int i = 0; i < n; ++i) s = lorenz_step(s, p, dt);
    return s;
  };
  const Vec3 ref = run(dense_dt);
  const double e1 = (run(0.02) - ref).cwiseAbs().maxCoeff();
  const double e2 = (run(0.01) - ref).cwiseAbs().maxCoeff();
  const double ratio = e1 / e2;
  EXPECT_GT(ratio, 13.0);
  EXPECT_LT(ratio, 19.0);
}

TEST(Lorenz, JacobianMatchesFiniteDifferences) {
  const LorenzParams p;
  const Vec3 s{1.3, -0.4, 20.0};
  const Eigen::Matrix3d j = lorenz_jacobian(s, p);
  const double h = 1e-6;
  for (int c = 0; c < 3; ++c) {
    Vec3 e = Vec3::Zero();
    e[c] = h;
    const Vec3 col = (lorenz_rhs(s + e, p) - lorenz_rhs(s - e, p)) / (2 * h);
    EXPECT_LT((col - j.col(c)).cwiseAbs().maxCoeff(), 1e-6);
  }
}

TEST(Adex, DefaultRunShapeAndSpikes) {
  const AdexRun run = integrate_adex({}, {}, 0.01, 400.0);
  EXPECT_EQ(run.trajectory.rows(), 40001u);
  EXPECT_EQ(run.trajectory.channel_names, (std::vector<std::string>{"V", "w"}));
  EXPECT_GT(run.spike_times.size(), 0u);
  EXPECT_EQ(run.adaptation_jumps, 7.0 * static_cast<double>(run.spike_times.size()));
  for (double t : run.spike_times) EXPECT_GE(t, 10.0);
}

TEST(Adex, SpikeJumpsAccountForFinalAdaptation) {
  // Replays the Euler recursion for w with the recorded V and subtracts the
  // continuous part; the remainder must be b times the spike count.
  const AdExParams p;
  const double dt = 0.01;
  const AdexRun run = integrate_adex(p, {}, dt, 400.0);
  const auto& v = run.trajectory.values;
  double continuous = 0.0;
  for (Eigen::Index i = 1; i < v.rows(); ++i) {
    const double w_prev = v(i - 1, 1);
    const double w_cont = w_prev + dt * (p.a * (v(i - 1, 0) - p.V_r) - w_prev) / p.tau_w;
    continuous += w_cont - w_prev;
  }
  const double jumps = v(v.rows() - 1, 1) - v(0, 1) - continuous;
  EXPECT_NEAR(jumps, p.b * static_cast<double>(run.spike_times.size()), 1e-9);
}

TEST(Adex, AdaptationDecaysAtRest) {
  const AdExParams p;
  EXPECT_DOUBLE_EQ(adex_rhs(p.V_r, 7.0, 0.0, p)[1], -7.0 / p.tau_w);
  // Scalar decay dw/dt = -w/tau_w halves w after tau_w ln 2.
  double w = 7.0;
  const double dt = 1e-3;
  const int n = static_cast<int>(std::lround(p.tau_w * std::log(2.0) / dt));
  for (int i = 0; i < n; ++i) w += dt * adex_rhs(p.V_r, w, 0.0, p)[1];
  EXPECT_NEAR(w, 3.5, 1e-3);
}

TEST(Adex, LiteralVoltageDriveAtReset) {
  const AdExParams p = AdExParams::literal();
  const double drive = adex_rhs(p.V_r, 0.0, 0.0, p)[0] * p.tau_m * p.C;
  EXPECT_NEAR(drive, -2.0 * std::exp(2.0), 1e-12);
  EXPECT_NEAR(drive, -14.778, 1e-3);
}

TEST(Adex, LiteralSignDiverges) {
  EXPECT_EQ(kind_of([] { (void)integrate_adex(AdExParams::literal(), {}, 0.01, 400.0); }),
            ErrorKind::IntegrationBlowup);
}

TEST(Adex, RejectsNonPositiveStep) {
  EXPECT_EQ(kind_of([] { (void)integrate_adex({}, {}, 0.0, 10.0); }), ErrorKind::InvalidArgument);
}
