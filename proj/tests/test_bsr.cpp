#include "eqlearn/dictionary.hpp"
#include "eqlearn/stepwise.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace eqlearn;

namespace {

Matrix design(std::mt19937_64& rng, Index n, int m1, int m2) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  Matrix X(n, 2);
  for (Index i = 0; i < n; ++i) X.row(i) << u(rng), u(rng);
  return evaluate_dictionary(X, build_dictionary(2, m1, m2));
}

}  // namespace

TEST(Bsr, SingleColumnResponseEndsAtLocalEvidenceOptimum) {
  std::mt19937_64 rng(51);
  const Matrix K = design(rng, 60, 4, 4);
  const Vector y = K.col(6) + 1e-3 * oracle::random_vector(60, rng);
  const Problem problem(y, K);
  const auto r = bsr_fit(problem);
  EXPECT_TRUE(r.fit.mask.test(6));
  ModelMask single(15);
  single.set(6);
  EXPECT_GE(problem.evidence(r.fit.mask), problem.evidence(single));
  // No single addition or removal improves the returned model.
  const double at = problem.evidence(r.fit.mask);
  for (std::size_t i = 0; i < 15; ++i) {
    ModelMask flip = r.fit.mask;
    flip.flip(i);
    EXPECT_LE(problem.evidence(flip), at + 1e-9) << "term " << i;
  }
}

TEST(Bsr, PureNoiseGivesAtMostOneTerm) {
  std::mt19937_64 rng(52);
  int small = 0;
  for (int rep = 0; rep < 50; ++rep) {
    const Matrix K = design(rng, 100, 4, 4);
    const auto r = bsr_fit(oracle::random_vector(100, rng), K);
    if (r.fit.mask.size() <= 1) ++small;
  }
  EXPECT_GE(small, 40) << small << "/50";
}

TEST(Bsr, TraceIsStrictlyIncreasingAndConsistent) {
  std::mt19937_64 rng(53);
  for (int rep = 0; rep < 10; ++rep) {
    const Matrix K = design(rng, 80, 4, 4);
    const Vector y = K.col(1) - 0.7 * K.col(8) + 0.3 * K.col(13) + 0.2 * oracle::random_vector(80, rng);
    const Problem problem(y, K);
    const auto r = bsr_fit(problem);
    double prev = r.initial_log_evidence;
    ModelMask replay(15);
    for (const auto& s : r.trace) {
      EXPECT_GT(s.log_evidence, prev + kStepwiseTolerance);
      prev = s.log_evidence;
      replay.flip(static_cast<std::size_t>(s.term));
      EXPECT_EQ(s.action == StepwiseStep::Action::Add, replay.test(static_cast<std::size_t>(s.term)));
    }
    EXPECT_EQ(replay, r.fit.mask);
    EXPECT_FALSE(r.hit_step_cap);
    EXPECT_EQ(*r.fit.log_evidence, prev);
  }
}

TEST(Bsr, NeverBeatsExhaustiveOptimum) {
  std::mt19937_64 rng(54);
  for (int rep = 0; rep < 5; ++rep) {
    const Matrix K = design(rng, 40, 3, 3);  // p = 10
    ASSERT_EQ(K.cols(), 10);
    const Vector y = K.col(2) + 0.5 * K.col(7) + 0.5 * oracle::random_vector(40, rng);
    const Problem problem(y, K);
    double global = kEvidenceSentinel;
    for (unsigned code = 1; code < (1u << 10); ++code) {
      ModelMask m(10);
      for (std::size_t i = 0; i < 10; ++i)
        if (code & (1u << i)) m.set(i);
      global = std::max(global, problem.evidence(m));
    }
    EXPECT_LE(*bsr_fit(problem).fit.log_evidence, global);
  }
}

TEST(Bsr, FirstStepIsBestSingleton) {
  std::mt19937_64 rng(55);
  const Matrix K = design(rng, 70, 4, 4);
  const Vector y = K.col(4) + K.col(10) + 0.1 * oracle::random_vector(70, rng);
  const Problem problem(y, K);
  const auto r = bsr_fit(problem);
  ASSERT_FALSE(r.trace.empty());
  int arg = 0;
  double best = kEvidenceSentinel;
  for (int i = 0; i < 15; ++i) {
    const double e = problem.evidence(ModelMask::from_indices(15, std::vector<int>{i}));
    if (e > best) {
      best = e;
      arg = i;
    }
  }
  EXPECT_EQ(r.trace.front().term, arg);
  EXPECT_EQ(r.trace.front().action, StepwiseStep::Action::Add);
  EXPECT_EQ(r.trace.front().log_evidence, best);
}

TEST(Bsr, WorkersDoNotChangeResult) {
  std::mt19937_64 rng(56);
  const Matrix K = design(rng, 90, 4, 4);
  const Vector y = K.col(3) - K.col(9) + 0.1 * oracle::random_vector(90, rng);
  const auto a = bsr_fit(y, K, {}, 1);
  const auto b = bsr_fit(y, K, {}, 4);
  EXPECT_EQ(a.fit.mask, b.fit.mask);
  EXPECT_EQ(a.fit.weights, b.fit.weights);
  ASSERT_EQ(a.trace.size(), b.trace.size());
}
