#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace eqlearn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Boolean selection of dictionary columns defining a candidate model.
class ModelMask {
 public:
  ModelMask() = default;
  explicit ModelMask(std::size_t p) : bits_(p, 0) {}

  static ModelMask from_indices(std::size_t p, std::span<const int> indices) {
    ModelMask mask(p);
    for (int i : indices) mask.set(static_cast<std::size_t>(i));
    return mask;
  }

  std::size_t dictionary_size() const noexcept { return bits_.size(); }
  bool test(std::size_t i) const { return bits_[i] != 0; }
  void set(std::size_t i, bool on = true) { bits_[i] = on ? 1 : 0; }
  void flip(std::size_t i) { bits_[i] ^= 1; }

  std::size_t size() const noexcept {
    return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
  }
  bool empty() const noexcept { return size() == 0; }

  std::vector<int> indices() const {
    std::vector<int> out;
    for (std::size_t i = 0; i < bits_.size(); ++i)
      if (bits_[i]) out.push_back(static_cast<int>(i));
    return out;
  }

  friend bool operator==(const ModelMask&, const ModelMask&) = default;
  friend auto operator<=>(const ModelMask& a, const ModelMask& b) { return a.bits_ <=> b.bits_; }

 private:
  std::vector<std::uint8_t> bits_;
};

/// Fitted candidate model. Weights are in original (un-standardized) units
/// and ordered like mask.indices().
struct FitResult {
  ModelMask mask;
  Vector weights;
  double r_squared = 0.0;
  double sigma_hat_sq = 0.0;
  std::optional<double> log_evidence;
};

/// Columns of `K` listed in `indices`, in that order.
inline Matrix select_columns(const Matrix& K, std::span<const int> indices) {
  Matrix out(K.rows(), static_cast<Index>(indices.size()));
  for (std::size_t j = 0; j < indices.size(); ++j) out.col(static_cast<Index>(j)) = K.col(indices[j]);
  return out;
}

inline Matrix select_columns(const Matrix& K, const ModelMask& mask) {
  const auto idx = mask.indices();
  return select_columns(K, std::span<const int>(idx));
}

}  // namespace eqlearn
