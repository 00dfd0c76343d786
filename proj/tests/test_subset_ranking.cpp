#include "eqlearn/subset_ranking.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <numeric>
#include <random>

using namespace eqlearn;

namespace {

std::vector<int> iota_vec(int n) {
  std::vector<int> v(static_cast<std::size_t>(n));
  std::iota(v.begin(), v.end(), 0);
  return v;
}

}  // namespace

TEST(TopRSquared, MatchesBruteForceEnumeration) {
  std::mt19937_64 rng(31);
  for (int rep = 0; rep < 10; ++rep) {
    const Matrix K = oracle::random_matrix(30, 9, rng);
    const Vector y = oracle::random_vector(30, rng);
    const auto active = iota_vec(9);
    for (int m = 1; m <= 4; ++m) {
      const auto ranked = top_r_squared(K, y, active, m, 15);
      const auto ref = oracle::enumerate_subsets(K, y, active, m);
      ASSERT_EQ(ranked.size(), std::min<std::size_t>(15, ref.size()));
      for (std::size_t j = 0; j < ranked.size(); ++j) {
        EXPECT_EQ(ranked.masks[j].indices(), ref[j].indices) << "m=" << m << " rank " << j;
        EXPECT_NEAR(ranked.residual_ss[j], ref[j].rss, 1e-9 * y.squaredNorm());
        EXPECT_NEAR(ranked.scores[j], 1.0 - ref[j].rss / y.squaredNorm(), 1e-10);
        if (j > 0) {
          EXPECT_LE(ranked.scores[j], ranked.scores[j - 1]);
        }
        EXPECT_EQ(ranked.masks[j].size(), static_cast<std::size_t>(m));
      }
      // Nothing outside the kept set beats the last kept model.
      for (std::size_t j = ranked.size(); j < ref.size(); ++j)
        EXPECT_GE(ref[j].rss, ranked.residual_ss.back() - 1e-9 * y.squaredNorm());
    }
  }
}

TEST(TopRSquared, RespectsActiveSubset) {
  std::mt19937_64 rng(32);
  const Matrix K = oracle::random_matrix(25, 10, rng);
  const Vector y = oracle::random_vector(25, rng);
  const std::vector<int> active{1, 3, 4, 7, 9};
  const auto ranked = top_r_squared(K, y, active, 2, 100);
  const auto ref = oracle::enumerate_subsets(K, y, active, 2);
  ASSERT_EQ(ranked.size(), 10u);
  for (std::size_t j = 0; j < ref.size(); ++j) EXPECT_EQ(ranked.masks[j].indices(), ref[j].indices);
  EXPECT_EQ(ranked.evaluated, 10u);
}

TEST(TopRSquared, NoiseFreeThreeTermTruthRanksFirst) {
  std::mt19937_64 rng(33);
  const Matrix K = oracle::random_matrix(50, 15, rng);
  const Vector y = 1.5 * K.col(2) - 2.0 * K.col(8) + 0.7 * K.col(13);
  const auto ranked = top_r_squared(K, y, iota_vec(15), 3, 5);
  EXPECT_EQ(ranked.masks[0].indices(), (std::vector<int>{2, 8, 13}));
  EXPECT_NEAR(ranked.scores[0], 1.0, 1e-12);
}

TEST(TopRSquared, Boundaries) {
  std::mt19937_64 rng(34);
  const Matrix K = oracle::random_matrix(20, 6, rng);
  const Vector y = oracle::random_vector(20, rng);
  const auto all = top_r_squared(K, y, iota_vec(6), 6, 10);
  ASSERT_EQ(all.size(), 1u);
  EXPECT_EQ(all.masks[0].size(), 6u);
  EXPECT_EQ(top_r_squared(K, y, iota_vec(6), 2, 1000).size(), 15u);
  try {
    top_r_squared(K, y, std::vector<int>{}, 1, 5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyActiveSet);
  }
  EXPECT_THROW(top_r_squared(K, y, iota_vec(6), 7, 5), Error);
  EXPECT_THROW(top_r_squared(K, y, iota_vec(6), 0, 5), Error);
}

TEST(TopRSquared, ExcludesRankDeficientSubsets) {
  std::mt19937_64 rng(35);
  Matrix K = oracle::random_matrix(20, 4, rng);
  K.col(3) = -2.0 * K.col(1);
  const Vector y = oracle::random_vector(20, rng);
  const auto ranked = top_r_squared(K, y, iota_vec(4), 2, 100);
  EXPECT_EQ(ranked.size(), 5u);
  EXPECT_EQ(ranked.excluded, 1u);
  for (const auto& m : ranked.masks) EXPECT_FALSE(m.test(1) && m.test(3));
}

TEST(TopRSquared, TiesBreakLexicographically) {
  const Matrix K = Matrix::Identity(4, 3);
  Vector y(4);
  y << 1, 1, 1, 0;
  const auto ranked = top_r_squared(K, y, iota_vec(3), 1, 3);
  ASSERT_EQ(ranked.size(), 3u);
  for (int j = 0; j < 3; ++j) EXPECT_EQ(ranked.masks[static_cast<std::size_t>(j)].indices(), std::vector<int>{j});
  const auto pairs = top_r_squared(K, y, iota_vec(3), 2, 2);
  EXPECT_EQ(pairs.masks[0].indices(), (std::vector<int>{0, 1}));
  EXPECT_EQ(pairs.masks[1].indices(), (std::vector<int>{0, 2}));
}

TEST(TopRSquared, WorkerCountDoesNotChangeResult) {
  std::mt19937_64 rng(36);
  const Matrix K = oracle::random_matrix(60, 20, rng);
  const Vector y = oracle::random_vector(60, rng);
  const auto one = top_r_squared(K, y, iota_vec(20), 3, 30, 1);
  const auto four = top_r_squared(K, y, iota_vec(20), 3, 30, 4);
  ASSERT_EQ(one.size(), four.size());
  for (std::size_t j = 0; j < one.size(); ++j) {
    EXPECT_EQ(one.masks[j], four.masks[j]);
    EXPECT_EQ(one.scores[j], four.scores[j]);
  }
  EXPECT_EQ(one.evaluated, four.evaluated);
  EXPECT_EQ(one.evaluated, 1140u);
}

TEST(RateFeatures, SingleModel) {
  std::mt19937_64 rng(37);
  const Matrix K = oracle::random_matrix(30, 8, rng);
  const Vector y = oracle::random_vector(30, rng);
  const auto ranked = top_r_squared(K, y, iota_vec(8), 3, 10);
  const Vector f = rate_features(ranked, 1, 8);
  for (int i = 0; i < 8; ++i) EXPECT_EQ(f(i), ranked.masks[0].test(static_cast<std::size_t>(i)) ? 1.0 : 0.0);
}

TEST(RateFeatures, DisjointEqualScores) {
  RankedModels r;
  r.model_size = 2;
  r.masks = {ModelMask::from_indices(6, std::vector<int>{0, 1}), ModelMask::from_indices(6, std::vector<int>{3, 4})};
  r.scores = {0.4, 0.4};
  const Vector f = rate_features(r, 2, 6);
  Vector want(6);
  want << 1, 1, 0, 1, 1, 0;
  EXPECT_EQ(f, want);
  RankedModels zero;
  zero.masks = r.masks;
  zero.scores = {0.0, 0.0};
  EXPECT_TRUE(rate_features(zero, 2, 6).isZero());
}

TEST(RateFeatures, MatchesNaiveRecount) {
  std::mt19937_64 rng(38);
  const Matrix K = oracle::random_matrix(40, 12, rng);
  const Vector y = oracle::random_vector(40, rng);
  const auto ranked = top_r_squared(K, y, iota_vec(12), 3, 20);
  for (std::size_t s : {1u, 5u, 20u, 50u}) {
    const Vector f = rate_features(ranked, s, 12);
    std::vector<double> count(12, 0.0);
    for (std::size_t j = 0; j < std::min(s, ranked.size()); ++j)
      for (int i = 0; i < 12; ++i)
        if (ranked.masks[j].test(static_cast<std::size_t>(i))) count[static_cast<std::size_t>(i)] += ranked.scores[j];
    const double mx = *std::max_element(count.begin(), count.end());
    for (int i = 0; i < 12; ++i) EXPECT_NEAR(f(i), count[static_cast<std::size_t>(i)] / mx, 1e-12);
    EXPECT_DOUBLE_EQ(f.maxCoeff(), 1.0);
  }
}
