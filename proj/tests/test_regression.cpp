#include "eqlearn/regression.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <numeric>
#include <random>

using namespace eqlearn;

namespace {

Matrix mat(std::initializer_list<std::initializer_list<double>> rows) {
  Matrix M(static_cast<Index>(rows.size()), static_cast<Index>(rows.begin()->size()));
  Index i = 0;
  for (const auto& r : rows) {
    Index j = 0;
    for (double v : r) M(i, j++) = v;
    ++i;
  }
  return M;
}

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

Vector centered(Vector y) { return y.array() - y.mean(); }

}  // namespace

TEST(Standardize, CentersResponse) {
  const auto s = standardize(vec({1, 2, 3}), mat({{1}, {1}, {1}}), false);
  EXPECT_DOUBLE_EQ(s.transform.center, 2.0);
  EXPECT_EQ(s.y.values, vec({-1, 0, 1}));
}

TEST(Standardize, CenteredInputUnchanged) {
  const auto s = standardize(vec({-1, 0, 1}), mat({{1}, {2}, {3}}), false);
  EXPECT_DOUBLE_EQ(s.transform.center, 0.0);
  EXPECT_EQ(s.y.values, vec({-1, 0, 1}));
}

TEST(Standardize, ScaledResponseHasUnitVarianceAndUnitNormColumns) {
  std::mt19937_64 rng(1);
  const Vector y = oracle::random_vector(30, rng) * 5.0;
  Matrix K = oracle::random_matrix(30, 4, rng);
  K.col(2).setZero();
  const auto s = standardize(y, K, true);
  EXPECT_NEAR(s.y.values.mean(), 0.0, 1e-12);
  EXPECT_NEAR(s.y.values.squaredNorm() / 29.0, 1.0, 1e-10);
  for (Index j : {0, 1, 3}) EXPECT_NEAR(s.K.col(j).norm(), 1.0, 1e-12);
  EXPECT_TRUE(s.transform.zero_columns[2]);
  EXPECT_TRUE(s.K.col(2).isZero());
}

TEST(Standardize, WithoutCenteringKeepsMeanAndScales) {
  const auto s = standardize(vec({1, 2, 3, 6}), mat({{1}, {1}, {1}, {1}}), true, false);
  EXPECT_DOUBLE_EQ(s.transform.center, 0.0);
  EXPECT_NEAR(s.y.values.mean(), 3.0 / s.transform.scale, 1e-12);
}

TEST(Standardize, Errors) {
  EXPECT_THROW(
      {
        try {
          standardize(vec({2, 2, 2}), mat({{1}, {2}, {3}}), true);
        } catch (const Error& e) {
          EXPECT_EQ(e.code(), ErrorCode::ConstantResponse);
          throw;
        }
      },
      Error);
  EXPECT_NO_THROW(standardize(vec({2, 2, 2}), mat({{1}, {2}, {3}}), false));
  Matrix bad = mat({{1}, {std::nan("")}, {3}});
  try {
    standardize(vec({1, 2, 3}), bad, true);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonFiniteInput);
  }
  EXPECT_THROW(standardize(vec({1}), mat({{1}}), false), Error);
}

TEST(Standardize, BackTransformedWeightsReproduceRawPredictions) {
  std::mt19937_64 rng(2);
  for (int rep = 0; rep < 10; ++rep) {
    Matrix K = oracle::random_matrix(40, 4, rng) * 3.0;
    K.col(0).setOnes();
    const Vector y = oracle::random_vector(40, rng) * 7.0 + Vector::Constant(40, 4.0);
    const auto s = standardize(y, K, true, false);
    const std::vector<int> idx{0, 1, 2, 3};
    const Vector w = to_original_weights(s.transform, idx, ols_fit(s.K, s.y.values));
    const Vector direct = oracle::normal_equations(K, y);
    EXPECT_LT((K * w - K * direct).cwiseAbs().maxCoeff(), 1e-10 * y.cwiseAbs().maxCoeff());
  }
}

TEST(Ols, IdentityDesign) { EXPECT_TRUE(ols_fit(Matrix::Identity(2, 2), vec({3, 4})).isApprox(vec({3, 4}), 1e-14)); }

TEST(Ols, ProportionalColumn) { EXPECT_NEAR(ols_fit(mat({{1}, {2}}), vec({2, 4}))(0), 2.0, 1e-14); }

TEST(Ols, MatchesNormalEquations) {
  std::mt19937_64 rng(3);
  for (int rep = 0; rep < 20; ++rep) {
    const Matrix K = oracle::random_matrix(20, 3, rng);
    const Vector y = oracle::random_vector(20, rng);
    const Vector w = ols_fit(K, y);
    const Vector ref = oracle::normal_equations(K, y);
    EXPECT_LT((w - ref).norm(), 1e-8 * ref.norm());
  }
}

TEST(Ols, ResidualOrthogonalToColumns) {
  std::mt19937_64 rng(4);
  const Matrix K = oracle::random_matrix(50, 5, rng) * 10.0;
  const Vector y = oracle::random_vector(50, rng);
  const Vector r = y - K * ols_fit(K, y);
  for (Index j = 0; j < K.cols(); ++j) EXPECT_LT(std::abs(K.col(j).normalized().dot(r)), 1e-8 * y.norm());
}

TEST(Ols, PermutationInvariant) {
  std::mt19937_64 rng(5);
  const Matrix K = oracle::random_matrix(25, 4, rng);
  const Vector y = oracle::random_vector(25, rng);
  const Vector w = ols_fit(K, y);
  const std::vector<int> perm{2, 0, 3, 1};
  const Vector wp = ols_fit(select_columns(K, perm), y);
  for (std::size_t j = 0; j < perm.size(); ++j) EXPECT_NEAR(wp(static_cast<Index>(j)), w(perm[j]), 1e-8);
}

TEST(Ols, RankDeficientIsSingular) {
  Matrix K = mat({{1, 2}, {2, 4}, {3, 6}});
  try {
    ols_fit(K, vec({1, 2, 3}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SingularDesign);
  }
  Matrix Z = mat({{1, 0}, {2, 0}, {3, 0}});
  EXPECT_THROW(ols_fit(Z, vec({1, 2, 3})), Error);
}

TEST(RSquared, PerfectFitIsOne) {
  const Matrix K = mat({{1, 0}, {0, 1}, {1, 1}, {2, -1}});
  const Vector y = K * vec({0.5, -2.0});
  EXPECT_NEAR(r_squared(K, y), 1.0, 1e-14);
}

TEST(RSquared, OrthogonalResponseIsZero) {
  const Matrix K = mat({{1}, {1}, {0}, {0}});
  EXPECT_NEAR(r_squared(K, vec({1, -1, 0, 0})), 0.0, 1e-15);
}

TEST(RSquared, SimplifiedEqualsDefinitionalOnCenteredData) {
  std::mt19937_64 rng(6);
  std::uniform_int_distribution<int> n_dist(10, 200), m_dist(1, 6);
  for (int rep = 0; rep < 200; ++rep) {
    const Index n = n_dist(rng);
    const Index m = m_dist(rng);
    const Matrix K = oracle::random_matrix(n, m, rng);
    const Vector y = centered(K * oracle::random_vector(m, rng) + oracle::random_vector(n, rng));
    EXPECT_NEAR(r_squared(K, y), oracle::r_squared_definitional(K, y), 1e-10);
  }
}

TEST(RSquared, AddingAColumnNeverDecreases) {
  std::mt19937_64 rng(7);
  for (int rep = 0; rep < 50; ++rep) {
    const Matrix K = oracle::random_matrix(30, 5, rng);
    const Vector y = centered(oracle::random_vector(30, rng));
    double prev = 0.0;
    for (Index m = 1; m <= 5; ++m) {
      const double r2 = r_squared(K.leftCols(m), y);
      EXPECT_GE(r2, prev - 1e-12);
      prev = r2;
    }
  }
}

TEST(ResidualVariance, HandExample) {
  const Matrix K = mat({{1}, {1}});
  const Vector y = vec({2, 0});
  const Vector w = ols_fit(K, y);
  EXPECT_NEAR(w(0), 1.0, 1e-15);
  EXPECT_NEAR(residual_variance(K, y, w), 2.0, 1e-14);
}

TEST(ResidualVariance, ExactFitIsZero) {
  const Matrix K = mat({{1}, {2}, {3}});
  EXPECT_NEAR(residual_variance(K, vec({2, 4, 6}), vec({2})), 0.0, 1e-15);
}

TEST(ResidualVariance, ScaledMeanSquare) {
  std::mt19937_64 rng(8);
  const Matrix K = oracle::random_matrix(40, 3, rng);
  const Vector y = oracle::random_vector(40, rng);
  const Vector w = ols_fit(K, y);
  const double mse = (y - K * w).squaredNorm() / 40.0;
  EXPECT_NEAR(residual_variance(K, y, w), mse * 40.0 / 37.0, 1e-12);
}

TEST(ResidualVariance, DegenerateDof) {
  try {
    residual_variance(Matrix::Identity(2, 2), vec({1, 2}), vec({1, 2}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DegenerateDof);
  }
}

TEST(ClassicalCriteria, AdjustedRSquaredFormula) {
  EXPECT_NEAR(adjusted_r_squared(0.9, 100, 3), 1.0 - 99.0 / 96.0 * 0.1, 1e-15);
  EXPECT_NEAR(adjusted_r_squared(0.9, 100, 3), 0.896875, 1e-12);
  EXPECT_DOUBLE_EQ(adjusted_r_squared(0.42, 50, 0), 0.42);
  EXPECT_THROW(adjusted_r_squared(0.5, 4, 3), Error);
}

TEST(ClassicalCriteria, MatchesLogLikelihoodRecomputation) {
  std::mt19937_64 rng(9);
  for (int rep = 0; rep < 20; ++rep) {
    const Index n = 30, m = 3;
    const Matrix K = oracle::random_matrix(n, m, rng);
    const Vector y = centered(K * oracle::random_vector(m, rng) + 0.5 * oracle::random_vector(n, rng));
    const Vector w = oracle::normal_equations(K, y);
    const Vector r = y - K * w;
    const double s2 = r.squaredNorm() / static_cast<double>(n - m);
    double ll = 0.0;
    for (Index i = 0; i < n; ++i)
      ll += -0.5 * std::log(2.0 * std::numbers::pi * s2) - r(i) * r(i) / (2.0 * s2);
    const auto c = classical_criteria(K, y, w);
    EXPECT_NEAR(c.log_likelihood, ll, 1e-10 * std::abs(ll));
    EXPECT_NEAR(c.aic, 2.0 * ll - 2.0 * m, 1e-9);
    EXPECT_NEAR(c.bic, ll - 2.0 * m * std::log(static_cast<double>(n)), 1e-9);
    EXPECT_NEAR(c.r_squared, oracle::r_squared_definitional(K, y), 1e-10);
    EXPECT_NEAR(c.adjusted_r_squared, 1.0 - (n - 1.0) / (n - m - 1.0) * (1.0 - c.r_squared), 1e-14);
  }
  EXPECT_THROW(classical_criteria(Matrix::Identity(3, 2), vec({1, 2, 3}), vec({1, 2})), Error);
}
