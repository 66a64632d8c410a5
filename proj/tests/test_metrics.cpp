#include <algorithm>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "dtr/metrics.hpp"
#include "oracles.hpp"

namespace {

using L = std::vector<std::size_t>;

TEST(Accuracy, PermutationInvariant) { EXPECT_DOUBLE_EQ(dtr::clustering_accuracy(L{0, 0, 1, 1}, L{1, 1, 0, 0}), 1.0); }

TEST(Accuracy, HalfMatchedAgainstBruteForce) {
  const L pred{0, 1, 0, 1}, truth{0, 0, 1, 1};
  const double brute = oracle::brute_force_accuracy(pred, truth);
  EXPECT_DOUBLE_EQ(brute, 0.5);
  EXPECT_DOUBLE_EQ(dtr::clustering_accuracy(pred, truth), brute);
}

TEST(Accuracy, Identity) {
  const L x{0, 2, 1, 1, 2};
  EXPECT_DOUBLE_EQ(dtr::clustering_accuracy(x, x), 1.0);
}

TEST(Accuracy, LengthMismatch) { EXPECT_THROW(dtr::clustering_accuracy(L{0, 1}, L{0}), dtr::InputError); }

TEST(Metrics, IdenticalPartitions) {
  const L x{0, 0, 1, 1, 2, 2};
  EXPECT_DOUBLE_EQ(dtr::nmi(x, x), 1.0);
  EXPECT_DOUBLE_EQ(dtr::ari(x, x), 1.0);
  EXPECT_DOUBLE_EQ(dtr::macro_f1(dtr::match_labels(x, x), x), 1.0);
}

TEST(Metrics, ConstantPredictionHasZeroAri) {
  const L pred{0, 0, 0, 0}, truth{0, 0, 1, 1};
  // Closed form on the 1x2 contingency table: index 2, expected 6*2/6 = 2, max 4.
  const double index = 1.0 + 1.0, sum_a = 6.0, sum_b = 2.0, pairs = 6.0;
  const double closed = (index - sum_a * sum_b / pairs) / (0.5 * (sum_a + sum_b) - sum_a * sum_b / pairs);
  EXPECT_DOUBLE_EQ(closed, 0.0);
  EXPECT_DOUBLE_EQ(dtr::ari(pred, truth), closed);
}

TEST(Metrics, SingletonsVsTwoClassesNmi) {
  const L pred{0, 1, 2, 3}, truth{0, 0, 1, 1};
  const double expected = oracle::entropy_nmi(pred, truth);
  EXPECT_NEAR(expected, 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(dtr::nmi(pred, truth), expected, 1e-12);
}

TEST(Metrics, SingleClusterConventions) {
  EXPECT_DOUBLE_EQ(dtr::nmi(L{0, 0, 0}, L{4, 4, 4}), 1.0);
  EXPECT_DOUBLE_EQ(dtr::nmi(L{0, 0, 0}, L{0, 1, 1}), 0.0);
}

TEST(Metrics, MacroF1ByHand) {
  // Class 0: tp 2 fp 1 fn 0 -> 0.8 ; class 1: tp 1 fp 0 fn 1 -> 2/3.
  const L mapped{0, 0, 0, 1}, truth{0, 0, 1, 1};
  EXPECT_NEAR(dtr::macro_f1(mapped, truth), (0.8 + 2.0 / 3.0) / 2.0, 1e-15);
}

TEST(Assignment, MatchesBruteForceOnRandomMatrices) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t m = std::uniform_int_distribution<std::size_t>(1, 6)(rng);
    std::vector<std::vector<double>> cost(m, std::vector<double>(m));
    for (auto& r : cost)
      for (auto& c : r) c = std::round(u(rng) * 4.0) / 4.0;
    std::vector<std::size_t> perm(m);
    std::iota(perm.begin(), perm.end(), 0);
    double best = 1e300;
    do {
      double s = 0.0;
      for (std::size_t i = 0; i < m; ++i) s += cost[i][perm[i]];
      best = std::min(best, s);
    } while (std::next_permutation(perm.begin(), perm.end()));
    const auto sol = dtr::solve_assignment(cost);
    double got = 0.0;
    std::vector<bool> used(m, false);
    for (std::size_t i = 0; i < m; ++i) {
      ASSERT_FALSE(used[sol[i]]);
      used[sol[i]] = true;
      got += cost[i][sol[i]];
    }
    ASSERT_NEAR(got, best, 1e-9);
  }
}

TEST(MetricsProperty, RelabelingInvarianceAndOracleAgreement) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 150; ++trial) {
    const std::size_t n = std::uniform_int_distribution<std::size_t>(2, 40)(rng);
    const std::size_t kp = std::uniform_int_distribution<std::size_t>(1, 5)(rng);
    const std::size_t kt = std::uniform_int_distribution<std::size_t>(2, 5)(rng);
    L pred(n), truth(n);
    for (auto& v : pred) v = std::uniform_int_distribution<std::size_t>(0, kp - 1)(rng);
    for (auto& v : truth) v = std::uniform_int_distribution<std::size_t>(0, kt - 1)(rng);
    truth[0] = 0;
    truth[1] = 1;  // non-constant truth

    std::vector<std::size_t> relabel(kp);
    std::iota(relabel.begin(), relabel.end(), 10);
    std::shuffle(relabel.begin(), relabel.end(), rng);
    L permuted(n);
    for (std::size_t i = 0; i < n; ++i) permuted[i] = relabel[pred[i]];

    const double acc = dtr::clustering_accuracy(pred, truth);
    ASSERT_DOUBLE_EQ(acc, dtr::clustering_accuracy(permuted, truth));
    ASSERT_NEAR(acc, oracle::brute_force_accuracy(pred, truth), 1e-12);

    // The identity bijection (valid when kp <= kt) scores at most the optimum.
    if (kp <= kt) {
      std::size_t fixed_hit = 0;
      for (std::size_t i = 0; i < n; ++i) fixed_hit += pred[i] == truth[i];
      ASSERT_GE(acc + 1e-12, static_cast<double>(fixed_hit) / static_cast<double>(n));
    }

    ASSERT_NEAR(dtr::nmi(pred, truth), dtr::nmi(permuted, truth), 1e-12);
    ASSERT_NEAR(dtr::ari(pred, truth), dtr::ari(permuted, truth), 1e-12);
    ASSERT_NEAR(dtr::ari(truth, truth), 1.0, 1e-12);
    ASSERT_NEAR(dtr::nmi(truth, truth), 1.0, 1e-12);

    const bool pred_constant = std::all_of(pred.begin(), pred.end(), [&](auto v) { return v == pred[0]; });
    if (!pred_constant) {
      ASSERT_NEAR(dtr::nmi(pred, truth), oracle::entropy_nmi(pred, truth), 1e-12);
    }
    const bool pred_singletons = [&] {
      L s = pred;
      std::sort(s.begin(), s.end());
      return std::adjacent_find(s.begin(), s.end()) == s.end();
    }();
    if (!pred_singletons && !pred_constant) {
      ASSERT_NEAR(dtr::ari(pred, truth), oracle::pair_counting_ari(pred, truth), 1e-12);
    }
  }
}

TEST(MetricsReport, SummaryAndJson) {
  std::vector<dtr::ClusteringScores> runs{{1.0, 0.5, 0.2, 0.9}, {0.5, 0.5, 0.4, 0.7}};
  const auto rep = dtr::MetricsReport::from_runs(runs);
  EXPECT_EQ(rep.n_runs, 2u);
  EXPECT_DOUBLE_EQ(rep.acc.mean, 0.75);
  EXPECT_DOUBLE_EQ(rep.acc.std, 0.25);
  EXPECT_DOUBLE_EQ(rep.nmi.std, 0.0);
  EXPECT_DOUBLE_EQ(rep.ari.median(), 0.30000000000000004);
  const auto j = dtr::to_json(rep);
  for (const char* key : {"acc", "nmi", "ari", "f1"}) {
    ASSERT_TRUE(j.contains(key));
    EXPECT_TRUE(j[key].contains("mean"));
    EXPECT_TRUE(j[key].contains("std"));
    EXPECT_EQ(j[key]["runs"], 2);
  }
}

}  // namespace
