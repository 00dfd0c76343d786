#pragma once

// Comparison methods: sequentially thresholded least squares (STLSQ) and
// forward regression orthogonal least squares (FROLS), plus a ridge solver
// and a k-fold grid search for the STLSQ threshold.

#include "eqlearn/error.hpp"
#include "eqlearn/parallel.hpp"
#include "eqlearn/problem.hpp"
#include "eqlearn/regression.hpp"
#include "eqlearn/types.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace eqlearn {

/// Minimizes ||K w - y||² + alpha ||w||². alpha = 0 is plain OLS.
inline Vector ridge_fit(const Matrix& K_sub, const Vector& y, double alpha) {
  if (alpha < 0.0) throw Error(ErrorCode::InvalidArgument, "ridge penalty must be >= 0");
  if (alpha == 0.0) return ols_fit(K_sub, y);
  const Index n = K_sub.rows();
  const Index m = K_sub.cols();

  // Solve in unit-norm column coordinates, w = D^-1 v, as the stacked system
  // [K D^-1; sqrt(alpha) D^-1] v = [y; 0].
  Vector norms = K_sub.colwise().norm().transpose();
  for (Index j = 0; j < m; ++j)
    if (norms(j) == 0.0) norms(j) = 1.0;
  Matrix stacked(n + m, m);
  stacked.topRows(n) = K_sub * norms.cwiseInverse().asDiagonal();
  stacked.bottomRows(m) = (std::sqrt(alpha) * norms.cwiseInverse()).asDiagonal();
  Vector rhs = Vector::Zero(n + m);
  rhs.head(n) = y;
  const Vector v = stacked.householderQr().solve(rhs);
  return v.cwiseQuotient(norms);
}

struct StlsqParams {
  double threshold = 0.1;
  double alpha = 1e-5;
  int max_iters = 20;

  void validate() const {
    if (!(threshold > 0.0) || alpha < 0.0 || max_iters < 1)
      throw Error(ErrorCode::InvalidArgument, "invalid STLSQ parameters");
  }
};

struct StlsqResult {
  FitResult fit;
  int iterations = 0;
  bool converged = false;
  bool all_terms_eliminated = false;
  std::vector<std::size_t> active_sizes;  // after each thresholding pass
};

/// Ridge on the active set, drop terms whose raw-unit weight magnitude is
/// below the threshold, repeat to a fixed point; OLS refit on survivors.
inline StlsqResult stlsq_fit(const Problem& problem, const StlsqParams& params) {
  params.validate();
  const std::size_t p = problem.dictionary_size();
  StlsqResult out;
  ModelMask active(p);
  for (std::size_t i = 0; i < p; ++i) active.set(i);

  for (int iter = 1; iter <= params.max_iters; ++iter) {
    out.iterations = iter;
    const auto idx = active.indices();
    const Vector w = ridge_fit(select_columns(problem.K_raw(), std::span<const int>(idx)), problem.y_raw(), params.alpha);
    ModelMask next(p);
    for (std::size_t j = 0; j < idx.size(); ++j)
      if (std::abs(w(static_cast<Index>(j))) >= params.threshold) next.set(static_cast<std::size_t>(idx[j]));
    out.active_sizes.push_back(next.size());
    const bool fixed_point = next == active;
    active = std::move(next);
    if (active.empty()) {
      out.all_terms_eliminated = true;
      break;
    }
    if (fixed_point) {
      out.converged = true;
      break;
    }
  }
  out.fit = problem.fit(active);
  return out;
}

struct FrolsParams {
  int max_terms = 10;
  double err_tolerance = 1e-6;

  void validate() const {
    if (max_terms < 1 || !(err_tolerance > 0.0 && err_tolerance < 1.0))
      throw Error(ErrorCode::InvalidArgument, "invalid FROLS parameters");
  }
};

struct FrolsResult {
  FitResult fit;
  std::vector<int> order;          // selection order
  std::vector<double> err;         // error-reduction ratio per selected term
  std::vector<double> cumulative;  // running sum of err
};

/// Forward selection by error-reduction ratio (q'y)² / y'y of each candidate
/// after orthogonalization against the terms already chosen.
inline FrolsResult frols_fit(const Problem& problem, const FrolsParams& params) {
  params.validate();
  const Matrix& K = problem.K();
  const Vector& y = problem.y();
  const std::size_t p = problem.dictionary_size();
  const std::size_t max_terms = std::min<std::size_t>(static_cast<std::size_t>(params.max_terms), p);
  const double yy = y.squaredNorm();

  FrolsResult out;
  ModelMask mask(p);
  Matrix Q(K.rows(), static_cast<Index>(max_terms));
  double total = 0.0;

  while (out.order.size() < max_terms && yy > 0.0) {
    const Index depth = static_cast<Index>(out.order.size());
    const auto basis = Q.leftCols(depth);
    int best = -1;
    double best_err = -1.0;
    Vector best_q;
    for (std::size_t j = 0; j < p; ++j) {
      if (mask.test(j)) continue;
      Vector v = K.col(static_cast<Index>(j));
      const double reference = v.norm();
      for (int pass = 0; pass < 2 && depth > 0; ++pass) v.noalias() -= basis * (basis.transpose() * v);
      const double norm = v.norm();
      if (reference == 0.0 || !(norm > kPivotTolerance * reference)) continue;
      v /= norm;
      const double g = v.dot(y);
      const double err = g * g / yy;
      if (err > best_err) {
        best = static_cast<int>(j);
        best_err = err;
        best_q = std::move(v);
      }
    }
    if (best < 0) break;
    Q.col(depth) = best_q;
    mask.set(static_cast<std::size_t>(best));
    total += best_err;
    out.order.push_back(best);
    out.err.push_back(best_err);
    out.cumulative.push_back(total);
    if (total >= 1.0 - params.err_tolerance) break;
  }
  out.fit = problem.fit(mask);
  return out;
}

/// Mean held-out squared error of `fit_mask(train) -> mask` refit by OLS,
/// over `folds` contiguous blocks of rows.
template <typename MaskFn>
double cross_validated_mse(const Problem& problem, int folds, MaskFn&& fit_mask) {
  const Index n = problem.samples();
  if (folds < 2 || n < folds) throw Error(ErrorCode::InvalidArgument, "invalid fold count");
  const Matrix& K = problem.K_raw();
  const Vector& y = problem.y_raw();
  double sse = 0.0;
  for (int f = 0; f < folds; ++f) {
    const Index lo = n * f / folds;
    const Index hi = n * (f + 1) / folds;
    const Index train_n = n - (hi - lo);
    Matrix K_train(train_n, K.cols());
    Vector y_train(train_n);
    K_train << K.topRows(lo), K.bottomRows(n - hi);
    y_train << y.head(lo), y.tail(n - hi);

    const Problem train(y_train, K_train, Preprocessing{.center_response = false, .scale = problem.preprocessing().scale});
    const ModelMask mask = fit_mask(train);
    const auto idx = mask.indices();
    Vector pred = Vector::Zero(hi - lo);
    if (!idx.empty()) {
      try {
        const Vector w = ols_fit(select_columns(K_train, std::span<const int>(idx)), y_train);
        pred = select_columns(K.middleRows(lo, hi - lo), std::span<const int>(idx)) * w;
      } catch (const Error&) {
        return std::numeric_limits<double>::infinity();
      }
    }
    sse += (y.segment(lo, hi - lo) - pred).squaredNorm();
  }
  return sse / static_cast<double>(n);
}

struct StlsqTuning {
  StlsqParams best;
  std::vector<double> thresholds;
  std::vector<double> cv_mse;
};

/// Picks the STLSQ threshold with the smallest k-fold CV error; ties go to
/// the larger threshold.
inline StlsqTuning tune_stlsq(const Problem& problem, std::vector<double> thresholds, StlsqParams base = {},
                              int folds = 5, int workers = 1) {
  if (thresholds.empty()) throw Error(ErrorCode::InvalidArgument, "empty threshold grid");
  std::sort(thresholds.begin(), thresholds.end());
  StlsqTuning out;
  out.thresholds = thresholds;
  out.cv_mse.assign(thresholds.size(), std::numeric_limits<double>::infinity());
  parallel_for(thresholds.size(), workers, [&](std::size_t i, std::size_t) {
    StlsqParams params = base;
    params.threshold = thresholds[i];
    out.cv_mse[i] = cross_validated_mse(problem, folds, [&](const Problem& train) { return stlsq_fit(train, params).fit.mask; });
  });
  std::size_t best = 0;
  for (std::size_t i = 1; i < thresholds.size(); ++i)
    if (out.cv_mse[i] <= out.cv_mse[best]) best = i;
  out.best = base;
  out.best.threshold = thresholds[best];
  return out;
}

}  // namespace eqlearn
