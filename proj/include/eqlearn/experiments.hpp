#pragma once

// Random-polynomial benchmark data and the identification / forecasting
// metrics used to score learnt models.

#include "eqlearn/dictionary.hpp"
#include "eqlearn/dynsys.hpp"
#include "eqlearn/error.hpp"
#include "eqlearn/random.hpp"
#include "eqlearn/types.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <vector>

namespace eqlearn {

/// Two neighbouring normals sharing ~5% of their mass sit 2·z_{0.975} std apart.
inline constexpr double kOverlapQuantile = 1.959964;

inline Dictionary polynomial_term_dictionary() { return build_dictionary(3, 2, 4); }
inline Dictionary search_dictionary() { return build_dictionary(3, 4, 6); }

struct PolynomialSpec {
  Dictionary dictionary;  // generating dictionary
  ModelMask mask;
  Vector weights;  // ordered like mask.indices()
  Vector means;
  Vector stds;
  Index n = 20;
  double sigma = 0.01;
};

/// Default sample count per polynomial size.
inline Index polynomial_sample_count(int size) {
  switch (size) {
    case 2: return 20;
    case 3: return 65;
    case 4: return 95;
    default: throw Error(ErrorCode::InvalidArgument, "polynomial size must be 2, 3 or 4");
  }
}

/// sigma_j = (distance from mu_j to the nearest other mean) / (2 z_{0.975}).
inline Vector overlap_stds(const Vector& means) {
  Vector stds(means.size());
  for (Index j = 0; j < means.size(); ++j) {
    double d = std::numeric_limits<double>::infinity();
    for (Index k = 0; k < means.size(); ++k)
      if (k != j) d = std::min(d, std::abs(means(j) - means(k)));
    if (!std::isfinite(d)) d = 1.0;
    stds(j) = d / (2.0 * kOverlapQuantile);
  }
  return stds;
}

/// Random sparse polynomial over `dict`: `size` distinct terms, weights on
/// [-4,-1] ∪ [1,4], feature means on [-20,20].
inline PolynomialSpec gen_random_polynomial(const Dictionary& dict, int size, std::uint64_t seed) {
  if (size < 1 || static_cast<std::size_t>(size) > dict.size())
    throw Error(ErrorCode::InvalidArgument, "polynomial size out of range");
  PolynomialSpec spec;
  spec.dictionary = dict;
  const std::size_t p = spec.dictionary.size();

  Rng rng(derive_seed(seed, "polynomial"));
  std::vector<int> all(p);
  std::iota(all.begin(), all.end(), 0);
  std::vector<int> picked;
  std::sample(all.begin(), all.end(), std::back_inserter(picked), size, rng);
  spec.mask = ModelMask::from_indices(p, picked);

  std::uniform_real_distribution<double> magnitude(1.0, 4.0);
  std::bernoulli_distribution negative(0.5);
  spec.weights.resize(size);
  for (int j = 0; j < size; ++j) spec.weights(j) = (negative(rng) ? -1.0 : 1.0) * magnitude(rng);

  std::uniform_real_distribution<double> mean(-20.0, 20.0);
  spec.means.resize(spec.dictionary.features());
  for (Index j = 0; j < spec.means.size(); ++j) spec.means(j) = mean(rng);
  spec.stds = overlap_stds(spec.means);
  return spec;
}

inline PolynomialSpec gen_random_polynomial(int size, std::uint64_t seed) {
  const Index n = polynomial_sample_count(size);
  PolynomialSpec spec = gen_random_polynomial(polynomial_term_dictionary(), size, seed);
  spec.n = n;
  return spec;
}

/// Noise-free polynomial value at each row of X.
inline Vector evaluate_polynomial(const PolynomialSpec& spec, const Matrix& X) {
  return select_columns(evaluate_dictionary(X, spec.dictionary), spec.mask) * spec.weights;
}

struct PolynomialData {
  Matrix X;
  Vector y;
};

inline PolynomialData gen_polynomial_data(const PolynomialSpec& spec, Index n, double sigma, std::uint64_t seed) {
  if (n < 1 || sigma < 0.0) throw Error(ErrorCode::InvalidArgument, "need N >= 1 and sigma >= 0");
  Rng rng(derive_seed(seed, "polynomial-data"));
  std::normal_distribution<double> standard(0.0, 1.0);
  PolynomialData d;
  d.X.resize(n, spec.means.size());
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < spec.means.size(); ++j) d.X(i, j) = spec.means(j) + spec.stds(j) * standard(rng);
  d.y = evaluate_polynomial(spec, d.X);
  if (sigma > 0.0)
    for (Index i = 0; i < n; ++i) d.y(i) += sigma * standard(rng);
  return d;
}

inline PolynomialData gen_polynomial_data(const PolynomialSpec& spec, std::uint64_t seed) {
  return gen_polynomial_data(spec, spec.n, spec.sigma, seed);
}

/// Same terms expressed over another dictionary with the same features.
inline ModelMask remap_mask(const ModelMask& mask, const Dictionary& from, const Dictionary& to) {
  ModelMask out(to.size());
  for (int i : mask.indices()) {
    const int j = to.find(from.term(static_cast<std::size_t>(i)));
    if (j < 0) throw Error(ErrorCode::InvalidArgument, "term missing from target dictionary");
    out.set(static_cast<std::size_t>(j));
  }
  return out;
}

/// True terms found minus wrong terms found.
inline int n_diff(const ModelMask& truth, const ModelMask& learnt) {
  if (truth.dictionary_size() != learnt.dictionary_size())
    throw Error(ErrorCode::InvalidArgument, "masks over different dictionaries");
  int found = 0;
  int wrong = 0;
  for (std::size_t i = 0; i < truth.dictionary_size(); ++i) {
    if (!learnt.test(i)) continue;
    if (truth.test(i))
      ++found;
    else
      ++wrong;
  }
  return found - wrong;
}

namespace detail {
inline std::set<TermExponents> term_set(const std::vector<PolynomialTerm>& eq) {
  std::set<TermExponents> s;
  for (const auto& t : eq)
    if (t.weight != 0.0) s.insert(t.term);
  return s;
}
}  // namespace detail

/// Equations whose term sets match exactly; weights are not compared.
inline int equations_correct(const OdeSystem& truth, const OdeSystem& learnt) {
  if (truth.dimension() != learnt.dimension()) {
    if (learnt.dimension() == 0) return 0;
    throw Error(ErrorCode::InvalidArgument, "systems differ in dimension");
  }
  int correct = 0;
  for (int k = 0; k < truth.dimension(); ++k)
    if (detail::term_set(truth.equation(k)) == detail::term_set(learnt.equation(k))) ++correct;
  return correct;
}

inline std::size_t system_size(const OdeSystem& s) {
  std::size_t n = 0;
  for (const auto& eq : s.equations()) n += detail::term_set(eq).size();
  return n;
}

struct ForecastResult {
  double mae = std::numeric_limits<double>::quiet_NaN();  // NaN when nothing was solvable
  int unsolvable_count = 0;
  int solvable_count = 0;
};

/// Mean absolute componentwise difference between learnt and true forecasts,
/// averaged over time points and then over solvable initial values.
inline ForecastResult forecast_mae(const OdeSystem& truth, const OdeSystem& learnt, const Matrix& initial_values,
                                   double dt, double horizon) {
  if (!(horizon > 0.0) || !(dt > 0.0)) throw Error(ErrorCode::InvalidArgument, "need dt > 0 and horizon > 0");
  ForecastResult out;
  double total = 0.0;
  for (Index r = 0; r < initial_values.rows(); ++r) {
    const Vector x0 = initial_values.row(r).transpose();
    const auto learnt_tr = integrate_learnt(learnt, x0, dt, horizon);
    if (!learnt_tr) {
      ++out.unsolvable_count;
      continue;
    }
    const Trajectory true_tr = integrate_rk4(truth, x0, dt, steps_for_horizon(dt, horizon));
    total += (learnt_tr->states - true_tr.states).cwiseAbs().mean();
    ++out.solvable_count;
  }
  if (out.solvable_count > 0) out.mae = total / out.solvable_count;
  return out;
}

inline double default_horizon(SystemId s) { return s == SystemId::Lorenz ? 1.0 : 5.0; }

/// States sampled uniformly from the true trajectory after a burn-in.
inline Matrix sample_attractor(SystemId system, int count, std::uint64_t seed, double burn_in = 10.0,
                               double span = 50.0, double dt = 0.01) {
  if (count < 0) throw Error(ErrorCode::InvalidArgument, "negative initial value count");
  const Index skip = steps_for_horizon(dt, burn_in);
  const Index n = skip + steps_for_horizon(dt, span);
  const Trajectory tr = integrate_rk4(true_system(system), default_initial_condition(system), dt, n);
  Rng rng(derive_seed(seed, "attractor"));
  std::uniform_int_distribution<Index> pick(skip, n - 1);
  Matrix out(count, tr.dimension());
  for (int i = 0; i < count; ++i) out.row(i) = tr.states.row(pick(rng));
  return out;
}

}  // namespace eqlearn
