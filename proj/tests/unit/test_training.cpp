#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "rcdenoise/error.hpp"
#include "rcdenoise/reservoir.hpp"
#include "rcdenoise/training.hpp"

using namespace rcdenoise;

namespace {

Matrix random_matrix(Eigen::Index r, Eigen::Index c, std::mt19937_64& g) {
  std::normal_distribution<double> n;
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = n(g);
  return m;
}

double ridge_loss(const Matrix& r, const Matrix& y, const Matrix& w, double lambda) {
  return (y - r * w).squaredNorm() + lambda * w.squaredNorm();
}

}  // namespace

TEST(RidgeFit, ExactFitWithoutPenalty) {
  Matrix r(2, 1), y(2, 1);
  r << 1, 2;
  y << 1, 2;
  EXPECT_NEAR(ridge_fit(r, y, 0.0)(0, 0), 1.0, 1e-15);
}

TEST(RidgeFit, ScalarClosedForm) {
  Matrix r(2, 1), y(2, 1);
  r << 1, 2;
  y << 1, 2;
  EXPECT_NEAR(ridge_fit(r, y, 5.0)(0, 0), 0.5, 1e-15);
}

TEST(RidgeFit, MatchesNormalEquationOracle) {
  std::mt19937_64 g(3);
  const Matrix r = random_matrix(50, 10, g);
  const Matrix y = random_matrix(50, 3, g);
  const Matrix w = ridge_fit(r, y, 1e-3);
  EXPECT_LT((w - oracle::ridge_normal_equations(r, y, 1e-3)).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(RidgeFit, SingularWithoutPenaltyIsRankDeficient) {
  Matrix r = Matrix::Zero(10, 3);
  r.col(0).setOnes();
  r.col(1).setOnes();
  try {
    (void)ridge_fit(r, Matrix::Ones(10, 1), 0.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::RankDeficiency);
  }
  EXPECT_NO_THROW((void)ridge_fit(r, Matrix::Ones(10, 1), 1e-6));
}

TEST(RidgeFit, IsAMinimizerOfThePenalizedLoss) {
  std::mt19937_64 g(8);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix r = random_matrix(40, 8, g);
    const Matrix y = random_matrix(40, 2, g);
    const double lambda = std::pow(10.0, trial % 5 - 2);
    const Matrix w = ridge_fit(r, y, lambda);
    const double base = ridge_loss(r, y, w, lambda);
    Matrix delta = random_matrix(8, 2, g);
    delta *= 1e-4 / delta.norm();
    EXPECT_GE(ridge_loss(r, y, w + delta, lambda), base);
    EXPECT_GE(ridge_loss(r, y, w - delta, lambda), base);
  }
}

TEST(RidgeFit, WeightNormShrinksWithLambda) {
  std::mt19937_64 g(10);
  const Matrix r = random_matrix(60, 12, g);
  const Matrix y = random_matrix(60, 2, g);
  double previous = std::numeric_limits<double>::infinity();
  for (double lambda : default_lambda_grid()) {
    const double norm = ridge_fit(r, y, lambda).norm();
    EXPECT_LE(norm, previous * (1 + 1e-12)) << "lambda " << lambda;
    previous = norm;
  }
}

TEST(SelectLambda, SingleCandidate) {
  std::mt19937_64 g(1);
  RidgeConfig cfg;
  cfg.lambda_grid = {0.25};
  const auto sel = select_lambda(random_matrix(50, 4, g), random_matrix(50, 1, g), cfg);
  EXPECT_EQ(sel.lambda, 0.25);
  ASSERT_EQ(sel.cv_scores.size(), 1u);
}

TEST(SelectLambda, PrefersSmallPenaltyOnNearlyExactData) {
  std::mt19937_64 g(2);
  const Matrix r = random_matrix(200, 5, g);
  Matrix w(5, 1);
  w << 1, -2, 0.5, 3, -1;
  const Matrix y = r * w + 1e-6 * random_matrix(200, 1, g);
  RidgeConfig cfg;
  cfg.lambda_grid = {1e-3, 1e3};
  const auto sel = select_lambda(r, y, cfg);
  EXPECT_EQ(sel.lambda, 1e-3);
  EXPECT_LT(sel.cv_scores[0], sel.cv_scores[1]);
}

TEST(SelectLambda, CvScoresMatchDirectFoldRefits) {
  std::mt19937_64 g(4);
  const Matrix r = random_matrix(100, 6, g);
  const Matrix y = random_matrix(100, 2, g);
  RidgeConfig cfg;
  const auto sel = select_lambda(r, y, cfg);
  ASSERT_EQ(sel.cv_scores.size(), cfg.lambda_grid.size());
  for (double s : sel.cv_scores) EXPECT_TRUE(std::isfinite(s));
  // Second route: explicit refits on each contiguous fold for a few lambdas.
  for (std::size_t gi : {0u, 15u, 20u, 30u}) {
    const double lambda = cfg.lambda_grid[gi];
    double total = 0.0;
    for (Eigen::Index f = 0; f < 5; ++f) {
      const Eigen::Index b = f * 100 / 5, e = (f + 1) * 100 / 5;
      Matrix rt(100 - (e - b), 6), yt(100 - (e - b), 2);
      rt << r.topRows(b), r.bottomRows(100 - e);
      yt << y.topRows(b), y.bottomRows(100 - e);
      const Matrix w = oracle::ridge_normal_equations(rt, yt, lambda);
      total += (y.middleRows(b, e - b) - r.middleRows(b, e - b) * w).squaredNorm() / y.middleRows(b, e - b).squaredNorm();
    }
    EXPECT_NEAR(sel.cv_scores[gi], total / 5.0, 1e-8 * std::max(1.0, total)) << "lambda " << lambda;
  }
}

TEST(SelectLambda, TiesGoToLargerLambda) {
  // Zero states: every lambda predicts zero, so all scores tie.
  RidgeConfig cfg;
  cfg.lambda_grid = {1e-2, 1.0, 1e2};
  const auto sel = select_lambda(Matrix::Zero(50, 3), Matrix::Ones(50, 1), cfg);
  EXPECT_EQ(sel.lambda, 1e2);
}

TEST(SelectLambda, RejectsEmptyGrid) {
  RidgeConfig cfg;
  cfg.lambda_grid.clear();
  EXPECT_THROW((void)select_lambda(Matrix::Ones(20, 1), Matrix::Ones(20, 1), cfg), Error);
}

TEST(Nmse, HandExamples) {
  Matrix t(1, 2), p(1, 2);
  t << 1, 1;
  p << 1, 0;
  EXPECT_DOUBLE_EQ(nmse(p, t), 0.5);
  EXPECT_DOUBLE_EQ(nmse(t, t), 0.0);
  EXPECT_DOUBLE_EQ(nmse(Matrix::Zero(1, 2), t), 1.0);
  EXPECT_THROW((void)nmse(t, Matrix::Zero(1, 2)), Error);
}

TEST(Predict, UntrainedIsStateError) {
  const auto esn = build_reservoir({10, 1.0, 0.9, 1.0, 0.3}, 1, 1);
  try {
    (void)predict(esn, Trajectory(0.0, 1.0, Matrix::Ones(5, 1), {"u"}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::State);
  }
}

TEST(Predict, ZeroReadoutGivesZeroOutput) {
  auto esn = build_reservoir({10, 1.0, 0.9, 1.0, 0.3}, 1, 1);
  esn.w_out = Matrix::Zero(10, 2);
  const auto p = predict(esn, Trajectory(0.0, 1.0, Matrix::Random(30, 1), {"u"}));
  EXPECT_EQ(p.output.values.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(p.output.rows(), 30u);
  EXPECT_EQ(p.washout_rows, 30u);
}

TEST(Predict, IdentityReadoutReturnsStates) {
  auto esn = build_reservoir({10, 1.0, 0.9, 1.0, 0.3}, 1, 1);
  esn.w_out = Matrix::Identity(10, 10);
  const Trajectory u(0.0, 1.0, Matrix::Random(30, 1), {"u"});
  EXPECT_EQ(predict(esn, u).output.values, run(esn, u));
}
