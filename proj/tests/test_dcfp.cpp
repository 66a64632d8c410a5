#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "dtr/dcfp.hpp"
#include "oracles.hpp"

namespace {

using dtr::NormalizationMode;

dtr::Matrix column(std::initializer_list<double> v) {
  dtr::Matrix m(v.size(), 1);
  std::size_t i = 0;
  for (double x : v) m(i++, 0) = x;
  return m;
}

dtr::DcfpConfig neutral(std::size_t f_max, std::size_t k = 1) {
  dtr::DcfpConfig c;
  c.f_max = f_max;
  c.alpha = 1.0;
  c.beta = 1.0;
  c.k = k;
  return c;
}

TEST(PropagateStep, SingleEdgeCopiesKnownValue) {
  const oracle::Edges edges{{0, 1}};
  const auto adj = dtr::normalize(dtr::build_graph(edges, 2), NormalizationMode::kSymmetric);
  const dtr::FeatureMatrix f(column({6.0, 0.0}), {true, false});
  // Oracle: dense A_hat * H, then restore row 0.
  const Eigen::MatrixXd ah = oracle::dense_normalized(edges, 2, true);
  Eigen::MatrixXd h(2, 1);
  h << 6.0, 0.0;
  Eigen::MatrixXd next = ah * h;
  next(0, 0) = 6.0;

  const auto out = dtr::propagate_step(adj, f);
  EXPECT_DOUBLE_EQ(out.values()(1, 0), next(1, 0));
  EXPECT_DOUBLE_EQ(out.values()(1, 0), 6.0);
  EXPECT_DOUBLE_EQ(out.values()(0, 0), 6.0);
}

TEST(PropagateStep, IsolatedMissingNodeStaysZero) {
  const auto adj = dtr::normalize(dtr::build_graph({{0, 1}}, 3), NormalizationMode::kSymmetric);
  dtr::Matrix h(3, 2, 1.0);
  h(2, 0) = h(2, 1) = 0.0;
  const auto out = dtr::propagate_step(adj, dtr::FeatureMatrix(h, {true, true, false}));
  EXPECT_EQ(out.values()(2, 0), 0.0);
  EXPECT_EQ(out.values()(2, 1), 0.0);
}

TEST(PropagateStep, AllCompleteIsExactIdentity) {
  const auto adj = dtr::normalize(dtr::build_graph({{0, 1}, {1, 2}, {2, 0}}, 3), NormalizationMode::kSymmetric);
  const auto h = column({0.1, -2.5, 7.25});
  const auto out = dtr::propagate_step(adj, dtr::FeatureMatrix(h, {true, true, true}));
  EXPECT_EQ(out.values(), h);
}

TEST(PropagateStep, DimensionMismatch) {
  const auto adj = dtr::normalize(dtr::build_graph({{0, 1}}, 2), NormalizationMode::kSymmetric);
  EXPECT_THROW(dtr::propagate_step(adj, dtr::FeatureMatrix(column({1, 2, 3}), {true, false, false})), dtr::InputError);
}

TEST(PropagateStep, NonFiniteIntermediateNamesRow) {
  const auto adj = dtr::normalize(dtr::build_graph({{0, 1}, {1, 2}}, 3), NormalizationMode::kSymmetric);
  const dtr::FeatureMatrix f(column({1.7e308, 0.0, 1.7e308}), {true, false, true});
  try {
    dtr::propagate_step(adj, f);
    FAIL() << "expected NumericError";
  } catch (const dtr::NumericError& e) {
    EXPECT_NE(std::string(e.what()).find("row 1"), std::string::npos) << e.what();
  }
}

TEST(FeatureMatrix, RejectsNonFinite) {
  EXPECT_THROW(dtr::FeatureMatrix(column({NAN}), {false}), dtr::InputError);
  EXPECT_THROW(dtr::FeatureMatrix(column({1.0}), {false, true}), dtr::InputError);
}

TEST(RunDcfp, ZeroIterationsReturnsInput) {
  const auto g = dtr::build_graph({{0, 1}, {1, 2}}, 3);
  const auto adj = dtr::normalize(g, NormalizationMode::kSymmetric);
  const dtr::FeatureMatrix f(column({6.0, 0.0, 0.0}), {true, false, false});
  dtr::DcfpConfig cfg;
  cfg.f_max = 0;
  cfg.k = 2;
  const auto r = dtr::run_dcfp(adj, f, cfg);
  EXPECT_EQ(r.features.values(), f.values());
  EXPECT_EQ(r.reweight_rounds, 0u);
  for (dtr::NodeId v = 0; v < 3; ++v) {
    for (dtr::NodeId u : g.neighbors(v)) EXPECT_EQ(r.adjacency.weight(v, u), adj.weight(v, u));
  }
  EXPECT_EQ(r.assignment.labels, dtr::kmeans(f.values(), 2, cfg.seed).labels);
}

TEST(RunDcfp, PathFixpointMatchesDenseSolve) {
  const oracle::Edges edges{{0, 1}, {1, 2}};
  const auto adj = dtr::normalize(dtr::build_graph(edges, 3), NormalizationMode::kSymmetric);
  const dtr::FeatureMatrix f(column({6.0, 0.0, 0.0}), {true, false, false});

  Eigen::MatrixXd x0(3, 1), expected;
  x0 << 6.0, 0.0, 0.0;
  ASSERT_TRUE(oracle::propagation_fixpoint(oracle::dense_normalized(edges, 3, true), {true, false, false}, x0, expected));
  EXPECT_NEAR(expected(1, 0), 8.4853, 1e-4);
  EXPECT_NEAR(expected(2, 0), 6.0, 1e-12);

  const auto r = dtr::run_dcfp(adj, f, neutral(400));
  EXPECT_NEAR(r.features.values()(1, 0), expected(1, 0), 1e-3);
  EXPECT_NEAR(r.features.values()(2, 0), expected(2, 0), 1e-3);
  EXPECT_EQ(r.features.values()(0, 0), 6.0);
}

TEST(RunDcfp, DisconnectedMissingComponentStaysZero) {
  // Component {0,1,2} fully observed, component {3,4,5} fully missing.
  const auto g = dtr::build_graph({{0, 1}, {1, 2}, {3, 4}, {4, 5}}, 6);
  const auto adj = dtr::normalize(g, NormalizationMode::kSymmetric);
  const dtr::FeatureMatrix f(column({1.0, 2.0, 3.0, 0.0, 0.0, 0.0}), {true, true, true, false, false, false});
  dtr::DcfpConfig cfg;
  cfg.f_max = 120;
  cfg.k = 2;
  const auto r = dtr::run_dcfp(adj, f, cfg);
  for (dtr::NodeId v = 3; v < 6; ++v) EXPECT_EQ(r.features.values()(v, 0), 0.0);
}

TEST(RunDcfp, ConfigValidation) {
  const auto adj = dtr::normalize(dtr::build_graph({{0, 1}}, 2), NormalizationMode::kSymmetric);
  const dtr::FeatureMatrix f(column({1.0, 0.0}), {true, false});
  dtr::DcfpConfig cfg;
  cfg.k = 1;
  cfg.t_period = 0;
  EXPECT_THROW(dtr::run_dcfp(adj, f, cfg), dtr::ConfigError);
  cfg.t_period = 40;
  cfg.alpha = 1.0;  // beta stays 0.5: neither valid reweighting nor neutral
  EXPECT_THROW(dtr::run_dcfp(adj, f, cfg), dtr::ConfigError);
  cfg.alpha = 2.0;
  cfg.beta = 1.2;
  EXPECT_THROW(dtr::run_dcfp(adj, f, cfg), dtr::ConfigError);
}

TEST(RunDcfp, TelemetryReportsReweightRounds) {
  const auto g = dtr::build_graph({{0, 1}, {1, 2}, {2, 3}, {3, 0}}, 4);
  const auto adj = dtr::normalize(g, NormalizationMode::kSymmetric);
  const dtr::FeatureMatrix f(column({1.0, 0.0, -1.0, 0.0}), {true, false, true, false});
  dtr::DcfpConfig cfg;
  cfg.f_max = 100;
  cfg.t_period = 40;
  cfg.k = 2;
  std::vector<dtr::DcfpStep> steps;
  const auto r = dtr::run_dcfp(adj, f, cfg, [&](const dtr::DcfpStep& s) { steps.push_back(s); });
  ASSERT_EQ(steps.size(), 100u);
  EXPECT_EQ(r.reweight_rounds, 2u);
  for (const auto& s : steps) EXPECT_EQ(s.reweighted, s.t == 40 || s.t == 80) << s.t;
}

TEST(DcfpProperty, CompleteRowsBitwiseConservedEveryStep) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = std::uniform_int_distribution<std::size_t>(5, 60)(rng);
    const auto g = dtr::build_graph(oracle::random_sparse(n, 0.1, rng), n);
    dtr::Matrix h(n, 3);
    std::vector<bool> complete(n);
    std::normal_distribution<double> nd(0.0, 2.0);
    for (std::size_t i = 0; i < n; ++i) {
      complete[i] = std::bernoulli_distribution(0.5)(rng);
      for (std::size_t j = 0; j < 3; ++j) h(i, j) = complete[i] ? nd(rng) : 0.0;
    }
    const dtr::FeatureMatrix f0(h, complete);
    auto adj = dtr::normalize(g, NormalizationMode::kSymmetric);
    dtr::FeatureMatrix f = f0;
    for (int t = 0; t < 30; ++t) {
      f = dtr::propagate_step(adj, f);
      for (std::size_t i = 0; i < n; ++i) {
        if (!complete[i]) continue;
        for (std::size_t j = 0; j < 3; ++j) ASSERT_EQ(f.values()(i, j), h(i, j));
      }
    }
    dtr::DcfpConfig cfg;
    cfg.f_max = 85;
    cfg.t_period = 20;
    cfg.k = std::min<std::size_t>(3, n);
    const auto r = dtr::run_dcfp(adj, f0, cfg);
    for (std::size_t i = 0; i < n; ++i) {
      if (!complete[i]) continue;
      for (std::size_t j = 0; j < 3; ++j) ASSERT_EQ(r.features.values()(i, j), h(i, j));
    }
  }
}

TEST(DcfpProperty, ChangeNormNonIncreasingWithRowSumsAtMostOne) {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = std::uniform_int_distribution<std::size_t>(4, 50)(rng);
    const auto g = dtr::build_graph(oracle::random_connected(n, 0.05, rng), n);
    const auto adj = dtr::normalize(g, NormalizationMode::kRowStochastic);
    dtr::Matrix h(n, 2);
    std::vector<bool> complete(n, false);
    complete[0] = true;
    for (std::size_t i = 1; i < n; ++i) complete[i] = std::bernoulli_distribution(0.4)(rng);
    std::normal_distribution<double> nd(0.0, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
      if (!complete[i]) continue;
      h(i, 0) = nd(rng);
      h(i, 1) = nd(rng);
    }
    std::vector<double> norms;
    dtr::run_dcfp(adj, dtr::FeatureMatrix(h, complete), neutral(200),
                  [&](const dtr::DcfpStep& s) { norms.push_back(s.change_norm); });
    for (std::size_t t = 2; t < norms.size(); ++t) ASSERT_LE(norms[t], norms[t - 1] + 1e-9) << "trial " << trial << " t " << t;
  }
}

TEST(DcfpProperty, MatchesDenseFixpointOnRandomConnectedGraphs) {
  std::mt19937_64 rng(41);
  int checked = 0;
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = std::uniform_int_distribution<std::size_t>(3, 50)(rng);
    const std::size_t d = std::uniform_int_distribution<std::size_t>(1, 4)(rng);
    const auto edges = oracle::random_connected(n, 4.0 / static_cast<double>(n), rng);
    std::vector<bool> complete(n);
    for (std::size_t i = 0; i < n; ++i) complete[i] = std::bernoulli_distribution(0.5)(rng);
    complete[std::uniform_int_distribution<std::size_t>(0, n - 1)(rng)] = true;
    dtr::Matrix h(n, d);
    Eigen::MatrixXd x0 = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
    std::uniform_real_distribution<double> ud(-3.0, 3.0);
    for (std::size_t i = 0; i < n; ++i) {
      if (!complete[i]) continue;
      for (std::size_t j = 0; j < d; ++j) x0(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = h(i, j) = ud(rng);
    }
    Eigen::MatrixXd expected;
    if (!oracle::propagation_fixpoint(oracle::dense_normalized(edges, n, true), complete, x0, expected)) continue;
    const auto adj = dtr::normalize(dtr::build_graph(edges, n), NormalizationMode::kSymmetric);
    const auto r = dtr::run_dcfp(adj, dtr::FeatureMatrix(h, complete), neutral(500));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        ASSERT_NEAR(r.features.values()(i, j), expected(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)), 1e-4)
            << "trial " << trial;
      }
    }
    ++checked;
  }
  EXPECT_GT(checked, 20);
}

}  // namespace
