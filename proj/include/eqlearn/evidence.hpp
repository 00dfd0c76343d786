#pragma once

// Exact log model evidence under the gamma-normal conjugate prior, with the
// prior hyperparameters fixed empirically from each candidate's own OLS fit.

#include "eqlearn/error.hpp"
#include "eqlearn/regression.hpp"
#include "eqlearn/types.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <limits>
#include <numbers>

namespace eqlearn {

/// Gamma-normal prior p(w, tau | mu, Sigma, k, theta). Sigma is diagonal and
/// scaled by tau (tau split off); theta is the gamma scale.
struct PriorHyperparams {
  Vector mu;
  Vector sigma_diag;
  double k = 3.0;
  double theta = 0.5;
};

struct EvidenceResult {
  double log_evidence_per_point = 0.0;
  double log_evidence_total = 0.0;
  double xi = 0.0;
  Index model_size = 0;
};

inline constexpr double kEvidenceSentinel = -std::numeric_limits<double>::infinity();

/// Gamma scale 1/2 with mode (k-1)*theta = 1, hence k = 3.
inline constexpr double kPriorTheta = 0.5;
inline constexpr double kPriorShape = 1.0 / kPriorTheta + 1.0;

/// Residual sums of squares at or below this are round-off, not signal.
inline double degenerate_rss_tolerance(const Vector& y) {
  const double floor = 1e3 * std::numeric_limits<double>::epsilon() * y.cwiseAbs().maxCoeff();
  return static_cast<double>(y.size()) * floor * floor;
}

/// mu = OLS estimate, diag(Sigma) = (1 - m/N) / RSS, theta = 1/2, k = 3.
inline PriorHyperparams empirical_prior(const Matrix& K_sub, const Vector& y) {
  const Index n = y.size();
  const Index m = K_sub.cols();
  if (n <= m) throw Error(ErrorCode::DegenerateDof, "empirical prior needs N > m");

  PriorHyperparams prior;
  prior.k = kPriorShape;
  prior.theta = kPriorTheta;
  if (m == 0) return prior;

  const LeastSquaresFit fit = least_squares(K_sub, y);
  if (fit.residual_ss <= degenerate_rss_tolerance(y))
    throw Error(ErrorCode::DegeneratePrior, "zero residual: prior precision undefined");
  const double precision = (1.0 - static_cast<double>(m) / static_cast<double>(n)) / fit.residual_ss;
  prior.mu = fit.weights;
  prior.sigma_diag = Vector::Constant(m, precision);
  return prior;
}

/// Closed-form log evidence:
///   ln p(y) = 1/2 ln(det Sigma / det A) - N/2 ln 2pi - (N/2 + k) ln(xi/2 + 1/theta)
///             - k ln theta + ln Gamma(N/2 + k) - ln Gamma(k)
/// with A = K'K + Sigma, b = K'y + Sigma mu, xi = y'y + mu' Sigma mu - b' A^-1 b.
inline EvidenceResult log_evidence(const Matrix& K_sub, const Vector& y, const PriorHyperparams& prior) {
  const Index n = y.size();
  const Index m = K_sub.cols();
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "log evidence needs N >= 1");
  if (K_sub.rows() != n) throw Error(ErrorCode::InvalidArgument, "K rows differ from y length");
  if (prior.mu.size() != m || prior.sigma_diag.size() != m)
    throw Error(ErrorCode::InvalidArgument, "prior dimension differs from model size");
  if (!(prior.k > 0.0) || !(prior.theta > 0.0) || !(prior.sigma_diag.array() > 0.0).all())
    throw Error(ErrorCode::InvalidArgument, "prior hyperparameters must be positive");

  double log_det_ratio = 0.0;
  double xi = y.squaredNorm();
  if (m > 0) {
    // det(A)/det(Sigma) = det(I + D^-1/2 K'K D^-1/2) with D = Sigma, which
    // stays accurate when Sigma dominates K'K.
    const Vector inv_sqrt = prior.sigma_diag.cwiseSqrt().cwiseInverse();
    Matrix B = inv_sqrt.asDiagonal() * (K_sub.transpose() * K_sub) * inv_sqrt.asDiagonal();
    B.diagonal().array() += 1.0;
    const Eigen::LLT<Matrix> llt_b(B);
    if (llt_b.info() != Eigen::Success) throw Error(ErrorCode::SingularDesign, "A is not positive definite");
    for (Index i = 0; i < m; ++i) log_det_ratio -= 2.0 * std::log(llt_b.matrixL()(i, i));

    // xi equals the minimum over w of ||y - K w||² + (w - mu)' Sigma (w - mu),
    // attained at w* = A^-1 b; the sum of squares form avoids cancellation.
    Matrix A = K_sub.transpose() * K_sub;
    A.diagonal() += prior.sigma_diag;
    const Vector b = K_sub.transpose() * y + prior.sigma_diag.cwiseProduct(prior.mu);
    const Eigen::LLT<Matrix> llt_a(A);
    if (llt_a.info() != Eigen::Success) throw Error(ErrorCode::SingularDesign, "A is not positive definite");
    const Vector w_star = llt_a.solve(b);
    const Vector dw = w_star - prior.mu;
    xi = (y - K_sub * w_star).squaredNorm() + dw.dot(prior.sigma_diag.cwiseProduct(dw));
  }

  const double gamma_rate = 0.5 * xi + 1.0 / prior.theta;
  if (!(gamma_rate > 0.0)) throw Error(ErrorCode::NonPositiveXi, "xi/2 + 1/theta must be positive");

  const double dn = static_cast<double>(n);
  const double total = 0.5 * log_det_ratio - 0.5 * dn * std::log(2.0 * std::numbers::pi) -
                       (0.5 * dn + prior.k) * std::log(gamma_rate) - prior.k * std::log(prior.theta) +
                       std::lgamma(0.5 * dn + prior.k) - std::lgamma(prior.k);

  EvidenceResult r;
  r.log_evidence_total = total;
  r.log_evidence_per_point = total / dn;
  r.xi = xi;
  r.model_size = m;
  return r;
}

/// Total log evidence of the model selected by `mask`; singular or
/// zero-residual candidates map to the -inf sentinel.
inline double evidence_of_mask(const ModelMask& mask, const Matrix& K, const Vector& y) {
  const Matrix K_sub = select_columns(K, mask);
  try {
    return log_evidence(K_sub, y, empirical_prior(K_sub, y)).log_evidence_total;
  } catch (const Error& e) {
    switch (e.code()) {
      case ErrorCode::SingularDesign:
      case ErrorCode::DegeneratePrior:
      case ErrorCode::DegenerateDof:
        return kEvidenceSentinel;
      default:
        throw;
    }
  }
}

}  // namespace eqlearn
