#pragma once

// A regression problem prepared for model search: the standardized response
// and design used for ranking and evidence, plus the raw data for refits.

#include "eqlearn/evidence.hpp"
#include "eqlearn/regression.hpp"
#include "eqlearn/types.hpp"

#include <cmath>
#include <limits>

namespace eqlearn {

struct Preprocessing {
  /// Subtract the response mean before search. Off by default: dictionary
  /// columns are not centered, so a centered response would force the
  /// constant term into every model whose terms have nonzero mean.
  bool center_response = false;
  /// Unit-variance response and unit-norm dictionary columns.
  bool scale = true;
};

class Problem {
 public:
  Problem(const Vector& y, const Matrix& K, Preprocessing pre = {})
      : data_(standardize(y, K, pre.scale, pre.center_response)),
        K_raw_(K),
        y_raw_(y.array() - data_.transform.center),
        pre_(pre) {}

  const Matrix& K() const noexcept { return data_.K; }
  const Vector& y() const noexcept { return data_.y.values; }
  const Transform& transform() const noexcept { return data_.transform; }
  const Preprocessing& preprocessing() const noexcept { return pre_; }
  /// Raw design and response (response minus the transform center).
  const Matrix& K_raw() const noexcept { return K_raw_; }
  const Vector& y_raw() const noexcept { return y_raw_; }
  Index samples() const noexcept { return data_.K.rows(); }
  std::size_t dictionary_size() const noexcept { return static_cast<std::size_t>(data_.K.cols()); }

  double evidence(const ModelMask& mask) const { return evidence_of_mask(mask, data_.K, data_.y.values); }

  /// OLS refit of `mask`: weights in raw units, R² and log evidence in
  /// standardized space, sigma_hat² in raw units. A rank-deficient mask gets
  /// NaN weights and the evidence sentinel.
  FitResult fit(const ModelMask& mask) const {
    FitResult r;
    r.mask = mask;
    const auto idx = mask.indices();
    const Index m = static_cast<Index>(idx.size());
    const double yy = y().squaredNorm();
    if (m == 0) {
      r.weights = Vector(0);
      r.r_squared = 0.0;
      r.sigma_hat_sq = yy / static_cast<double>(samples()) * square(transform().scale);
      r.log_evidence = evidence(mask);
      return r;
    }
    const Matrix K_sub = select_columns(data_.K, std::span<const int>(idx));
    try {
      const LeastSquaresFit ls = least_squares(K_sub, y());
      r.weights = to_original_weights(transform(), idx, ls.weights);
      r.r_squared = yy > 0.0 ? clamp_unit(ls.explained_ss / yy) : 0.0;
      r.sigma_hat_sq = samples() > m ? ls.residual_ss / static_cast<double>(samples() - m) * square(transform().scale)
                                     : std::numeric_limits<double>::quiet_NaN();
      r.log_evidence = evidence(mask);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::SingularDesign) throw;
      r.weights = Vector::Constant(m, std::numeric_limits<double>::quiet_NaN());
      r.sigma_hat_sq = std::numeric_limits<double>::quiet_NaN();
      r.log_evidence = kEvidenceSentinel;
    }
    return r;
  }

 private:
  static double square(double v) { return v * v; }

  Standardized data_;
  Matrix K_raw_;
  Vector y_raw_;
  Preprocessing pre_;
};

}  // namespace eqlearn
