#pragma once

// Dense least squares on candidate design submatrices and the selection
// criteria built on it (R², residual variance, adjusted R², AIC, BIC).

#include "eqlearn/error.hpp"
#include "eqlearn/types.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

namespace eqlearn {

/// Relative pivot tolerance for rank decisions on unit-norm columns.
inline constexpr double kPivotTolerance = 1e-10;

/// Response after centering and optional scaling: values = (raw - center) / scale.
struct ResponseVector {
  Vector values;
  double center = 0.0;
  double scale = 1.0;
};

/// Everything needed to map standardized-space quantities back to raw units.
struct Transform {
  double center = 0.0;
  double scale = 1.0;
  Vector column_norms;              // divisor applied to each K column (1 if untouched)
  std::vector<bool> zero_columns;   // columns with zero norm, left as-is
};

struct Standardized {
  ResponseVector y;
  Matrix K;
  Transform transform;
};

/// Centers y (optionally) and, when `scale_columns` is set, divides y by its
/// sample standard deviation and every K column by its Euclidean norm.
/// K columns are never centered, so a constant dictionary term survives.
inline Standardized standardize(const Vector& y, const Matrix& K, bool scale_columns,
                                bool center_response = true) {
  const Index n = y.size();
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "standardize needs at least two samples");
  if (K.rows() != n) throw Error(ErrorCode::InvalidArgument, "K row count differs from y length");
  if (!y.allFinite() || !K.allFinite()) throw Error(ErrorCode::NonFiniteInput, "y or K contains NaN/Inf");

  Standardized out;
  const double mean = y.mean();
  out.transform.center = center_response ? mean : 0.0;

  out.y.values = y.array() - out.transform.center;
  out.K = K;
  out.transform.column_norms = Vector::Ones(K.cols());
  out.transform.zero_columns.assign(static_cast<std::size_t>(K.cols()), false);

  if (scale_columns) {
    const double var = (y.array() - mean).square().sum() / static_cast<double>(n - 1);
    if (!(var > 0.0)) throw Error(ErrorCode::ConstantResponse, "response has zero variance");
    out.transform.scale = std::sqrt(var);
    out.y.values /= out.transform.scale;
    for (Index j = 0; j < K.cols(); ++j) {
      const double norm = K.col(j).norm();
      if (norm > 0.0) {
        out.K.col(j) /= norm;
        out.transform.column_norms(j) = norm;
      } else {
        out.transform.zero_columns[static_cast<std::size_t>(j)] = true;
      }
    }
  }
  out.y.center = out.transform.center;
  out.y.scale = out.transform.scale;
  return out;
}

/// Maps standardized-space weights for `indices` to raw units. The response
/// center is not folded in; raw predictions are center + K_raw * w.
inline Vector to_original_weights(const Transform& t, std::span<const int> indices, const Vector& w_std) {
  Vector w(w_std.size());
  for (std::size_t j = 0; j < indices.size(); ++j)
    w(static_cast<Index>(j)) = t.scale * w_std(static_cast<Index>(j)) / t.column_norms(indices[j]);
  return w;
}

/// Result of a rank-revealing least-squares solve.
struct LeastSquaresFit {
  Vector weights;
  double explained_ss = 0.0;  // ||Q1' y||^2 = y' K (K'K)^-1 K' y
  double residual_ss = 0.0;   // ||Q2' y||^2
};

/// Column-pivoted Householder QR on unit-normalized columns; throws
/// SingularDesign when the numerical rank is below the column count.
inline LeastSquaresFit least_squares(const Matrix& K_sub, const Vector& y) {
  const Index m = K_sub.cols();
  const Index n = K_sub.rows();
  if (m < 1) throw Error(ErrorCode::InvalidArgument, "least squares needs at least one column");
  if (y.size() != n) throw Error(ErrorCode::InvalidArgument, "y length differs from K rows");
  if (n < m) throw Error(ErrorCode::SingularDesign, "fewer rows than columns");

  Vector norms = K_sub.colwise().norm().transpose();
  if ((norms.array() <= 0.0).any()) throw Error(ErrorCode::SingularDesign, "zero column in design");
  Matrix scaled = K_sub * norms.cwiseInverse().asDiagonal();

  Eigen::ColPivHouseholderQR<Matrix> qr(scaled.rows(), scaled.cols());
  qr.setThreshold(kPivotTolerance);
  qr.compute(scaled);
  if (qr.rank() < m) throw Error(ErrorCode::SingularDesign, "design is numerically rank deficient");

  LeastSquaresFit fit;
  fit.weights = qr.solve(y).cwiseQuotient(norms);
  Vector qty = y;
  qty.applyOnTheLeft(qr.householderQ().transpose());
  fit.explained_ss = qty.head(m).squaredNorm();
  fit.residual_ss = qty.tail(n - m).squaredNorm();
  return fit;
}

/// OLS weights minimizing ||K_sub w - y||².
inline Vector ols_fit(const Matrix& K_sub, const Vector& y) { return least_squares(K_sub, y).weights; }

inline double clamp_unit(double v) { return std::clamp(v, 0.0, 1.0); }

/// Coefficient of determination in the simplified form for a centered response,
/// y'K(K'K)^-1K'y / y'y, clamped to [0, 1].
inline double r_squared(const Matrix& K_sub, const Vector& y) {
  const double yy = y.squaredNorm();
  if (!(yy > 0.0)) return 0.0;
  return clamp_unit(least_squares(K_sub, y).explained_ss / yy);
}

inline double residual_sum_of_squares(const Matrix& K_sub, const Vector& y, const Vector& weights) {
  return (y - K_sub * weights).squaredNorm();
}

/// sigma_hat^2 = RSS / (N - m), with m the candidate model size.
inline double residual_variance(const Matrix& K_sub, const Vector& y, const Vector& weights) {
  const Index n = y.size();
  const Index m = K_sub.cols();
  if (n <= m) throw Error(ErrorCode::DegenerateDof, "residual variance needs N > m");
  return residual_sum_of_squares(K_sub, y, weights) / static_cast<double>(n - m);
}

inline double adjusted_r_squared(double r2, Index n, Index m) {
  if (n <= m + 1) throw Error(ErrorCode::DegenerateDof, "adjusted R² needs N > m + 1");
  return 1.0 - static_cast<double>(n - 1) / static_cast<double>(n - m - 1) * (1.0 - r2);
}

struct ClassicalCriteria {
  double r_squared = 0.0;
  double adjusted_r_squared = 0.0;
  double log_likelihood = 0.0;
  double aic = 0.0;
  double bic = 0.0;
};

/// Gaussian log-likelihood at (w, sigma_hat), sigma_hat² = RSS/(N-m).
inline double gaussian_log_likelihood(double rss, Index n, Index m) {
  const double sigma_sq = rss / static_cast<double>(n - m);
  const double dn = static_cast<double>(n);
  if (sigma_sq <= 0.0) return std::numeric_limits<double>::infinity();
  return -0.5 * dn * std::log(2.0 * std::numbers::pi * sigma_sq) - 0.5 * rss / sigma_sq;
}

/// Adjusted R², AIC = 2 lnL - 2m and BIC = lnL - 2m ln N (larger is better for
/// both, matching the printed sign convention).
inline ClassicalCriteria classical_criteria(const Matrix& K_sub, const Vector& y, const Vector& weights) {
  const Index n = y.size();
  const Index m = K_sub.cols();
  if (n <= m + 1) throw Error(ErrorCode::DegenerateDof, "criteria need N > m + 1");
  const double rss = residual_sum_of_squares(K_sub, y, weights);
  const double yy = y.squaredNorm();

  ClassicalCriteria c;
  c.r_squared = yy > 0.0 ? clamp_unit(1.0 - rss / yy) : 0.0;
  c.adjusted_r_squared = adjusted_r_squared(c.r_squared, n, m);
  c.log_likelihood = gaussian_log_likelihood(rss, n, m);
  c.aic = 2.0 * c.log_likelihood - 2.0 * static_cast<double>(m);
  c.bic = c.log_likelihood - 2.0 * static_cast<double>(m) * std::log(static_cast<double>(n));
  return c;
}

}  // namespace eqlearn
