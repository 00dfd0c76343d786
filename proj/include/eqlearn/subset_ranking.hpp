#pragma once

// Exhaustive R² ranking of all size-m subsets of the active dictionary
// columns, and the R²-weighted feature rating built from the top models.

#include "eqlearn/error.hpp"
#include "eqlearn/parallel.hpp"
#include "eqlearn/regression.hpp"
#include "eqlearn/types.hpp"

#include <algorithm>
#include <queue>
#include <span>
#include <vector>

namespace eqlearn {

/// Top models of one size, best first. Ranking is by residual sum of squares
/// (equivalently R² descending); ties go to the lexicographically smaller
/// index tuple. Rank-deficient subsets are excluded.
struct RankedModels {
  int model_size = 0;
  std::vector<ModelMask> masks;
  std::vector<double> scores;       // R², descending
  std::vector<double> residual_ss;  // ascending
  std::size_t evaluated = 0;        // subsets scored
  std::size_t excluded = 0;         // leaves rejected as rank deficient

  std::size_t size() const noexcept { return masks.size(); }
  bool empty() const noexcept { return masks.empty(); }
};

namespace detail {

struct ScoredSubset {
  double rss;
  std::vector<int> indices;
};

inline bool ranks_before(const ScoredSubset& a, const ScoredSubset& b) {
  if (a.rss != b.rss) return a.rss < b.rss;
  return a.indices < b.indices;
}

struct RanksBefore {
  bool operator()(const ScoredSubset& a, const ScoredSubset& b) const { return ranks_before(a, b); }
};

/// Keeps the `capacity` best subsets; top() is the worst retained one.
class TopK {
 public:
  explicit TopK(std::size_t capacity) : capacity_(capacity) {}

  bool admits(double rss, std::span<const int> idx) const {
    if (heap_.size() < capacity_) return true;
    const auto& worst = heap_.top();
    if (rss != worst.rss) return rss < worst.rss;
    return std::lexicographical_compare(idx.begin(), idx.end(), worst.indices.begin(), worst.indices.end());
  }

  void push(double rss, std::span<const int> idx) {
    if (capacity_ == 0 || !admits(rss, idx)) return;
    heap_.push({rss, std::vector<int>(idx.begin(), idx.end())});
    if (heap_.size() > capacity_) heap_.pop();
  }

  std::vector<ScoredSubset> drain() {
    std::vector<ScoredSubset> out;
    out.reserve(heap_.size());
    while (!heap_.empty()) {
      out.push_back(heap_.top());
      heap_.pop();
    }
    return out;
  }

 private:
  std::size_t capacity_;
  std::priority_queue<ScoredSubset, std::vector<ScoredSubset>, RanksBefore> heap_;
};

/// Depth-first sweep over combinations sharing orthogonalized prefixes.
/// Residual vectors are carried explicitly so that residuals far below
/// ||y|| stay accurate.
class SubsetSweep {
 public:
  SubsetSweep(const Matrix& K, const Vector& y, std::span<const int> active, int m, TopK& top)
      : K_(K), active_(active), m_(m), top_(top), Q_(K.rows(), m), chosen_(static_cast<std::size_t>(m)),
        residuals_(static_cast<std::size_t>(m) + 1, Vector(K.rows())), work_(K.rows()) {
    residuals_[0] = y;
  }

  void run_from(std::size_t first_pos) {
    if (!admit(0, first_pos)) return;
    if (m_ == 1) return;
    descend(1, first_pos + 1);
  }

  std::size_t evaluated = 0;
  std::size_t excluded = 0;

 private:
  // Orthogonalizes column active_[pos] against Q[:, :depth] (two Gram-Schmidt
  // passes) into work_. Returns its remaining norm, or 0 when it falls below
  // the pivot tolerance.
  double orthogonalize(int depth, std::size_t pos) {
    const auto col = K_.col(active_[pos]);
    work_ = col;
    if (depth > 0) {
      const auto Qd = Q_.leftCols(depth);
      for (int pass = 0; pass < 2; ++pass) work_.noalias() -= Qd * (Qd.transpose() * work_);
    }
    const double norm = work_.norm();
    const double reference = col.norm();
    if (!(norm > kPivotTolerance * reference) || reference == 0.0) return 0.0;
    return norm;
  }

  bool admit(int depth, std::size_t pos) {
    chosen_[static_cast<std::size_t>(depth)] = active_[pos];
    const double norm = orthogonalize(depth, pos);
    const bool leaf = depth + 1 == m_;
    if (norm == 0.0) {
      if (leaf) ++excluded;
      return false;
    }
    work_ /= norm;
    const Vector& r = residuals_[static_cast<std::size_t>(depth)];
    const double proj = work_.dot(r);
    if (leaf) {
      ++evaluated;
      const double rss = (r - proj * work_).squaredNorm();
      top_.push(rss, std::span<const int>(chosen_));
      return true;
    }
    Q_.col(depth) = work_;
    residuals_[static_cast<std::size_t>(depth) + 1] = r - proj * work_;
    return true;
  }

  void descend(int depth, std::size_t start) {
    const std::size_t remaining = static_cast<std::size_t>(m_ - depth);
    for (std::size_t pos = start; pos + remaining <= active_.size(); ++pos) {
      if (!admit(depth, pos)) continue;
      if (depth + 1 < m_) descend(depth + 1, pos + 1);
    }
  }

  const Matrix& K_;
  std::span<const int> active_;
  int m_;
  TopK& top_;
  Matrix Q_;
  std::vector<int> chosen_;
  std::vector<Vector> residuals_;
  Vector work_;
};

}  // namespace detail

/// R² for every size-m subset of `active` columns of K; returns the `keep`
/// best. `active` must be sorted ascending. y is taken as given (centered or
/// not); R² = 1 - RSS / y'y.
inline RankedModels top_r_squared(const Matrix& K, const Vector& y, std::span<const int> active, int m,
                                  std::size_t keep, int workers = 1) {
  if (active.empty()) throw Error(ErrorCode::EmptyActiveSet, "no active dictionary columns");
  if (m < 1 || static_cast<std::size_t>(m) > active.size())
    throw Error(ErrorCode::InvalidArgument, "model size must lie in [1, active count]");

  const std::size_t first_positions = active.size() - static_cast<std::size_t>(m) + 1;
  const std::size_t pool = static_cast<std::size_t>(std::max(workers, 1));
  std::vector<detail::TopK> tops(pool, detail::TopK(keep));
  std::vector<std::size_t> evaluated(pool, 0);
  std::vector<std::size_t> excluded(pool, 0);

  parallel_for(first_positions, workers, [&](std::size_t pos, std::size_t w) {
    detail::SubsetSweep sweep(K, y, active, m, tops[w]);
    sweep.run_from(pos);
    evaluated[w] += sweep.evaluated;
    excluded[w] += sweep.excluded;
  });

  std::vector<detail::ScoredSubset> merged;
  for (auto& t : tops) {
    auto part = t.drain();
    merged.insert(merged.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
  }
  std::sort(merged.begin(), merged.end(), detail::ranks_before);
  if (merged.size() > keep) merged.resize(keep);

  const double yy = y.squaredNorm();
  RankedModels out;
  out.model_size = m;
  for (std::size_t w = 0; w < pool; ++w) {
    out.evaluated += evaluated[w];
    out.excluded += excluded[w];
  }
  for (const auto& s : merged) {
    out.masks.push_back(ModelMask::from_indices(static_cast<std::size_t>(K.cols()), s.indices));
    out.residual_ss.push_back(s.rss);
    out.scores.push_back(yy > 0.0 ? clamp_unit(1.0 - s.rss / yy) : 0.0);
  }
  return out;
}

/// F = sum over the first min(s, t') models of R²_j * mask_j, normalized so
/// its maximum is 1 (an all-zero rating stays zero).
inline Vector rate_features(const RankedModels& ranked, std::size_t s, std::size_t p) {
  Vector rating = Vector::Zero(static_cast<Index>(p));
  const std::size_t pool = std::min(s, ranked.size());
  for (std::size_t j = 0; j < pool; ++j)
    for (int i : ranked.masks[j].indices()) rating(i) += ranked.scores[j];
  const double max = rating.size() > 0 ? rating.maxCoeff() : 0.0;
  if (max > 0.0) rating /= max;
  return rating;
}

}  // namespace eqlearn
