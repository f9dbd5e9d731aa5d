// Copyright 2026 The ConVerSum Authors
// SPDX-License-Identifier: Apache-2.0

#include "conversum/contrastive.hpp"

#include <algorithm>
#include <random>

#include <gtest/gtest.h>

namespace conversum {
namespace {

TEST(BuildPairs, Examples) {
  LossConfig config;
  auto pairs = build_pairs(3, config);
  std::vector<PairSpec> expected{{0, 1, 0.01}, {0, 2, 0.02}, {1, 2, 0.01}};
  ASSERT_EQ(pairs.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(pairs[i].positive_index, expected[i].positive_index);
    EXPECT_EQ(pairs[i].negative_index, expected[i].negative_index);
    EXPECT_NEAR(pairs[i].margin, expected[i].margin, 1e-15);
  }
  EXPECT_TRUE(build_pairs(1, config).empty());
  EXPECT_TRUE(build_pairs(0, config).empty());
  EXPECT_EQ(build_pairs(8, config).size(), 28u);
}

TEST(BuildPairs, FixedMargin) {
  LossConfig config;
  config.rank_scaled = false;
  for (const auto& p : build_pairs(5, config)) EXPECT_DOUBLE_EQ(p.margin, 0.01);
}

TEST(BuildPairs, NegativeMarginRejected) {
  LossConfig config;
  config.base_margin = -0.1;
  EXPECT_THROW(build_pairs(3, config), ContrastiveError);
}

TEST(RankingLoss, Examples) {
  EXPECT_DOUBLE_EQ(ranking_loss({{0.9, 0.5}, {{0, 1, 0.01}}}), 0.0);
  EXPECT_NEAR(ranking_loss({{0.5, 0.9}, {{0, 1, 0.01}}}), 0.41, 1e-12);
  EXPECT_NEAR(ranking_loss({{0.7, 0.7}, {{0, 1, 0.01}}}), 0.01, 1e-15);
}

TEST(RankingLoss, IndexOutOfRange) {
  try {
    ranking_loss({{0.1, 0.2}, {{0, 2, 0.01}}});
    FAIL();
  } catch (const ContrastiveError& e) {
    EXPECT_EQ(e.kind(), ContrastiveError::Kind::index_out_of_range);
  }
  EXPECT_THROW(loss_subgradient({{0.1}, {{1, 0, 0.01}}}), ContrastiveError);
}

TEST(RankingLoss, PerfectOrderingWithMarginGapsIsZero) {
  LossConfig config;
  std::vector<double> scores{0.9, 0.88, 0.85, 0.8, 0.7};
  EXPECT_DOUBLE_EQ(ranking_loss({scores, build_pairs(scores.size(), config)}), 0.0);
}

TEST(LossSubgradient, Examples) {
  auto g = loss_subgradient({{0.5, 0.9}, {{0, 1, 0.01}}});
  EXPECT_EQ(g, (std::vector<double>{-1.0, 1.0}));
  auto zero = loss_subgradient({{0.9, 0.5}, {{0, 1, 0.01}}});
  EXPECT_EQ(zero, (std::vector<double>{0.0, 0.0}));
  // Hinge argument exactly zero contributes nothing.
  auto boundary = loss_subgradient({{0.5, 0.5}, {{0, 1, 0.0}}});
  EXPECT_EQ(boundary, (std::vector<double>{0.0, 0.0}));
}

class RandomInstances : public ::testing::Test {
 protected:
  std::mt19937_64 rng_{1234};
  std::vector<double> random_scores(std::size_t n) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> s(n);
    for (auto& x : s) x = u(rng_);
    return s;
  }
};

TEST_F(RandomInstances, SubgradientMatchesBruteForce) {
  LossConfig config;
  for (int trial = 0; trial < 200; ++trial) {
    std::size_t n = 1 + trial % 8;
    auto scores = random_scores(n);
    auto pairs = build_pairs(n, config);
    auto g = loss_subgradient({scores, pairs});
    std::vector<double> expected(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        if (0.01 * static_cast<double>(j - i) - scores[i] + scores[j] > 0.0) {
          expected[i] -= 1.0;
          expected[j] += 1.0;
        }
      }
    }
    EXPECT_EQ(g, expected);
  }
}

TEST_F(RandomInstances, SubgradientMatchesFiniteDifferences) {
  LossConfig config;
  const double eps = 1e-5;
  int checked = 0;
  for (int trial = 0; trial < 100; ++trial) {
    auto scores = random_scores(8);
    auto pairs = build_pairs(8, config);
    bool near_kink = std::any_of(pairs.begin(), pairs.end(), [&](const PairSpec& p) {
      return std::abs(p.margin - scores[p.positive_index] + scores[p.negative_index]) <= 1e-3;
    });
    if (near_kink) continue;
    ++checked;
    auto g = loss_subgradient({scores, pairs});
    for (std::size_t k = 0; k < 8; ++k) {
      auto up = scores, down = scores;
      up[k] += eps;
      down[k] -= eps;
      double fd = (ranking_loss({up, pairs}) - ranking_loss({down, pairs})) / (2 * eps);
      EXPECT_NEAR(g[k], fd, 1e-4);
    }
  }
  EXPECT_GT(checked, 50);
}

TEST_F(RandomInstances, ConvexAndShiftInvariant) {
  LossConfig config;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    auto a = random_scores(6);
    auto b = random_scores(6);
    auto pairs = build_pairs(6, config);
    double t = unit(rng_);
    std::vector<double> mix(6);
    for (std::size_t i = 0; i < 6; ++i) mix[i] = t * a[i] + (1 - t) * b[i];
    EXPECT_LE(ranking_loss({mix, pairs}),
              t * ranking_loss({a, pairs}) + (1 - t) * ranking_loss({b, pairs}) + 1e-12);

    auto shifted = a;
    for (auto& x : shifted) x += 0.37;
    EXPECT_NEAR(ranking_loss({shifted, pairs}), ranking_loss({a, pairs}), 1e-12);
    EXPECT_GE(ranking_loss({a, pairs}), 0.0);
  }
}

}  // namespace
}  // namespace conversum
