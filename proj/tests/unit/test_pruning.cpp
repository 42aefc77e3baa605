#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "fixtures.hpp"
#include "rcdenoise/error.hpp"
#include "rcdenoise/pruning.hpp"
#include "rcdenoise/readout.hpp"

using namespace rcdenoise;

namespace {

const fixture::LorenzData& lorenz() {
  static const auto d = fixture::lorenz_data(fixture::small_lorenz(), 4.0, 1);
  return d;
}

EchoStateNetwork trained(std::size_t n, std::uint64_t seed, double p = 0.3) {
  ReservoirOptions opt;
  opt.bias_scale = 1.0;
  auto esn = build_reservoir({n, 1.0, 0.9, 1.0, p}, 2, seed, opt);
  fit_channel_scaling(esn, lorenz().data);
  (void)fit_readout(esn, lorenz().data, {});
  return esn;
}

void check_audit(const PruneResult& r, double tol) {
  for (const auto& e : r.audit) {
    if (e.accepted)
      EXPECT_LE(e.nmse_after, (1.0 + tol) * e.nmse_before);
    else
      EXPECT_GT(e.nmse_after, (1.0 + tol) * e.nmse_before);
  }
}

}  // namespace

TEST(NodeScores, NormalizedRangesAndComposite) {
  const auto esn = trained(40, 2);
  const auto scores = node_scores(esn, training_states(esn, lorenz().data));
  ASSERT_EQ(scores.size(), 40u);
  for (const auto& s : scores) {
    for (double v : {s.norm_abs_mean_state, s.norm_state_variance, s.norm_degree, s.norm_clustering, s.norm_pagerank}) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
    EXPECT_NEAR(s.composite,
                s.norm_abs_mean_state + s.norm_state_variance + s.norm_degree + s.norm_clustering + s.norm_pagerank,
                1e-15);
    EXPECT_LE(s.composite, 5.0);
  }
}

TEST(NodeScores, SymmetricNetworkGivesEqualComposites) {
  EchoStateNetwork esn;
  const Eigen::Index n = 5;
  esn.hyper = {5, 1.0, 0.5, 1.0, 1.0};
  esn.edges = EdgeMask::Constant(n, n, true);
  for (Eigen::Index i = 0; i < n; ++i) esn.edges(i, i) = false;
  esn.w_res = esn.edges.cast<double>() * 0.1;
  esn.w_in = Matrix::Ones(n, 1);
  esn.bias = Vector::Zero(n);
  const Matrix states = Matrix::Ones(30, n) * 0.3;
  const auto scores = node_scores(esn, states);
  for (const auto& s : scores) EXPECT_EQ(s.composite, scores.front().composite);
}

TEST(NodeScores, EmptyStatesRejected) {
  const auto esn = trained(10, 2);
  EXPECT_THROW((void)node_scores(esn, Matrix(0, 10)), Error);
}

TEST(PruneNodes, IsolatedNodeRanksFirstAndIsHarmless) {
  auto esn = trained(30, 3);
  const Eigen::Index k = 7;
  esn.w_res.row(k).setZero();
  esn.w_res.col(k).setZero();
  esn.edges.row(k).setConstant(false);
  esn.edges.col(k).setConstant(false);
  esn.w_in.row(k).setZero();
  esn.bias[k] = 0.0;
  restore_spectral_radius(esn);
  (void)fit_readout(esn, lorenz().data, {});
  const auto before = evaluate_segments(esn, lorenz().data.validation);

  PruneConfig cfg;
  cfg.prune_fraction = 1.0 / 30.0;
  cfg.max_trials = 1;
  const auto r = prune_nodes(esn, lorenz().data, cfg);
  ASSERT_EQ(r.audit.size(), 1u);
  EXPECT_EQ(r.audit[0].ids, "7");
  EXPECT_TRUE(r.audit[0].accepted);
  EXPECT_EQ(r.esn.n_nodes(), 29u);
  const auto after = evaluate_segments(r.esn, lorenz().data.validation);
  EXPECT_LT((after.prediction - before.prediction).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(PruneNodes, TinyFractionStillNominatesOneNode) {
  const auto esn = trained(30, 3);
  PruneConfig cfg;
  cfg.prune_fraction = 1e-4;
  cfg.max_trials = 1;
  const auto r = prune_nodes(esn, lorenz().data, cfg);
  ASSERT_EQ(r.audit.size(), 1u);
  EXPECT_EQ(r.audit[0].ids.find(';'), std::string::npos);
}

TEST(PruneNodes, AuditInvariantAndBestSeenReturned) {
  const auto esn = trained(60, 4);
  PruneConfig cfg;
  cfg.prune_fraction = 0.1;
  cfg.max_trials = 8;
  const auto r = prune_nodes(esn, lorenz().data, cfg);
  check_audit(r, cfg.accept_tolerance);
  EXPECT_LE(r.nmse, r.initial_nmse);
  EXPECT_NEAR(spectral_radius(r.esn.w_res), 0.9, 1e-9);
  EXPECT_TRUE(r.esn.trained());
}

TEST(PruneNodes, HarmfulBatchIsRejectedAndSkipped) {
  const auto esn = trained(40, 5);
  PruneConfig cfg;
  cfg.prune_fraction = 0.9;
  cfg.accept_tolerance = 0.0;
  cfg.max_trials = 1;
  const auto r = prune_nodes(esn, lorenz().data, cfg);
  ASSERT_EQ(r.audit.size(), 1u);
  EXPECT_FALSE(r.audit[0].accepted);
  EXPECT_EQ(r.esn.n_nodes(), 40u);
  EXPECT_EQ(r.nmse, r.initial_nmse);
}

TEST(PruneNodes, FloorAtTwoNodes) {
  auto esn = trained(10, 6);
  remove_nodes(esn, {0, 1, 2, 3, 4, 5, 6, 7});
  esn.w_out = Matrix::Zero(2, 3);
  try {
    (void)prune_nodes(esn, lorenz().data, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::PruneFloor);
  }
}

TEST(PruneEdges, ZeroWeightEdgesGoFirstWithoutEffect) {
  auto esn = trained(30, 7);
  std::vector<std::pair<Eigen::Index, Eigen::Index>> zeroed;
  for (Eigen::Index i = 0; i < 30 && zeroed.size() < 4; ++i)
    for (Eigen::Index j = 0; j < 30 && zeroed.size() < 4; ++j)
      if (esn.edges(i, j) && (i + j) % 5 == 0) {
        esn.w_res(i, j) = 0.0;
        zeroed.push_back({i, j});
      }
  ASSERT_EQ(zeroed.size(), 4u);
  restore_spectral_radius(esn);
  (void)fit_readout(esn, lorenz().data, {});
  const auto before = evaluate_segments(esn, lorenz().data.validation);

  PruneConfig cfg;
  cfg.prune_fraction = 4.0 / static_cast<double>(esn.edge_count());
  cfg.max_trials = 1;
  const auto r = prune_edges(esn, lorenz().data, cfg);
  ASSERT_EQ(r.audit.size(), 1u);
  EXPECT_TRUE(r.audit[0].accepted);
  for (auto [i, j] : zeroed) {
    EXPECT_NE(r.audit[0].ids.find(std::to_string(j) + ">" + std::to_string(i)), std::string::npos);
    EXPECT_FALSE(r.esn.edges(i, j));
  }
  const auto after = evaluate_segments(r.esn, lorenz().data.validation);
  EXPECT_LT((after.prediction - before.prediction).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(PruneEdges, RemovingEveryEdgeIsDegenerate) {
  auto esn = trained(10, 8);
  std::vector<std::pair<std::size_t, std::size_t>> all;
  for (Eigen::Index i = 0; i < 10; ++i)
    for (Eigen::Index j = 0; j < 10; ++j)
      if (esn.edges(i, j)) all.push_back({static_cast<std::size_t>(i), static_cast<std::size_t>(j)});
  remove_edges(esn, all);
  try {
    restore_spectral_radius(esn);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DegenerateTopology);
  }
  PruneConfig cfg;
  cfg.prune_fraction = 0.999;
  try {
    (void)prune_edges(trained(10, 8), lorenz().data, cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DegenerateTopology);
  }
}

TEST(PruneEdges, AuditInvariantOnLorenz) {
  const auto esn = trained(50, 9);
  PruneConfig cfg;
  cfg.max_trials = 6;
  const auto r = prune_edges(esn, lorenz().data, cfg);
  check_audit(r, cfg.accept_tolerance);
  EXPECT_LE(r.nmse, r.initial_nmse * (1.0 + cfg.accept_tolerance));
  EXPECT_NEAR(spectral_radius(r.esn.w_res), 0.9, 1e-9);
}

TEST(Truncate, RenumbersRoundsAndWritesAudit) {
  const auto esn = trained(40, 10);
  PruneConfig cfg;
  cfg.max_trials = 3;
  const auto r = truncate(esn, lorenz().data, cfg);
  for (std::size_t i = 0; i < r.audit.size(); ++i) EXPECT_EQ(r.audit[i].round, i + 1);
  const auto path = std::filesystem::temp_directory_path() / "rcdenoise_audit_test.csv";
  write_audit(path, r.audit);
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "round,action,ids,nmse_before,nmse_after,accepted");
  std::filesystem::remove(path);
}

TEST(Grow, ZeroBatchLeavesNetworkUnchanged) {
  const auto esn = trained(20, 11);
  const auto r = grow(esn, lorenz().data, {}, 0, 1);
  EXPECT_EQ(r.esn.w_res, esn.w_res);
  EXPECT_EQ(r.esn.w_in, esn.w_in);
  EXPECT_TRUE(r.audit.empty());
}

TEST(Grow, UndersizedReservoirImproves) {
  const auto esn = trained(5, 12, 0.5);
  PruneConfig cfg;
  cfg.max_trials = 10;
  const auto r = grow(esn, lorenz().data, cfg, 5, 3);
  EXPECT_LT(r.nmse, r.initial_nmse);
  EXPECT_GT(r.esn.n_nodes(), 5u);
  check_audit(r, cfg.accept_tolerance);
  EXPECT_NEAR(spectral_radius(r.esn.w_res), 0.9, 1e-9);
}

TEST(Retune, NeverWorsens) {
  const auto esn = trained(30, 13);
  const auto r = retune(esn, lorenz().data, 8, 2);
  EXPECT_LE(r.nmse, r.initial_nmse);
  ASSERT_EQ(r.audit.size(), 1u);
  EXPECT_EQ(r.audit[0].action, AuditAction::Retune);
}

TEST(PruneConfigTest, RejectsOutOfRangeFraction) {
  PruneConfig cfg;
  cfg.prune_fraction = 1.0;
  EXPECT_THROW(cfg.validate(), Error);
  cfg.prune_fraction = 0.1;
  cfg.max_trials = 0;
  EXPECT_THROW(cfg.validate(), Error);
}
