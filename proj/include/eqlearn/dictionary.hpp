#pragma once

// Polynomial basis-function dictionary: all exponent tuples with every
// individual power <= M1 and collective power <= M2, including the constant.

#include "eqlearn/error.hpp"
#include "eqlearn/types.hpp"

#include <algorithm>
#include <numeric>
#include <string>
#include <vector>

namespace eqlearn {

struct TermExponents {
  std::vector<int> exponents;

  int degree() const { return std::accumulate(exponents.begin(), exponents.end(), 0); }
  std::size_t features() const { return exponents.size(); }

  friend bool operator==(const TermExponents&, const TermExponents&) = default;
  friend auto operator<=>(const TermExponents&, const TermExponents&) = default;
};

/// Graded-lex order: total degree first, then lexicographic on the tuple.
inline bool graded_lex_less(const TermExponents& a, const TermExponents& b) {
  const int da = a.degree();
  const int db = b.degree();
  if (da != db) return da < db;
  return a.exponents < b.exponents;
}

class Dictionary {
 public:
  Dictionary() = default;
  Dictionary(std::vector<TermExponents> terms, int features, int max_individual, int max_collective)
      : terms_(std::move(terms)), features_(features), m1_(max_individual), m2_(max_collective) {}

  const std::vector<TermExponents>& terms() const noexcept { return terms_; }
  const TermExponents& term(std::size_t i) const { return terms_[i]; }
  std::size_t size() const noexcept { return terms_.size(); }
  int features() const noexcept { return features_; }
  int max_individual_power() const noexcept { return m1_; }
  int max_collective_power() const noexcept { return m2_; }

  /// Index of `term`, or -1 when absent.
  int find(const TermExponents& term) const {
    const auto it = std::find(terms_.begin(), terms_.end(), term);
    return it == terms_.end() ? -1 : static_cast<int>(it - terms_.begin());
  }

 private:
  std::vector<TermExponents> terms_;
  int features_ = 0;
  int m1_ = 0;
  int m2_ = 0;
};

inline Dictionary build_dictionary(int features, int max_individual, int max_collective) {
  if (features < 1 || max_individual < 0 || max_collective < 0)
    throw Error(ErrorCode::InvalidArgument, "dictionary parameters out of range");

  std::vector<TermExponents> terms;
  std::vector<int> current(static_cast<std::size_t>(features), 0);
  // Odometer over [0, M1]^l, keeping tuples whose sum respects M2.
  while (true) {
    if (std::accumulate(current.begin(), current.end(), 0) <= max_collective) terms.push_back({current});
    int pos = features - 1;
    while (pos >= 0 && current[static_cast<std::size_t>(pos)] == max_individual) {
      current[static_cast<std::size_t>(pos)] = 0;
      --pos;
    }
    if (pos < 0) break;
    ++current[static_cast<std::size_t>(pos)];
  }
  std::sort(terms.begin(), terms.end(), graded_lex_less);
  return Dictionary(std::move(terms), features, max_individual, max_collective);
}

/// K[i][n] = prod_j X[i][j]^e_nj, with per-feature powers precomputed up to M1.
inline Matrix evaluate_dictionary(const Matrix& X, const Dictionary& dict) {
  if (X.cols() != dict.features())
    throw Error(ErrorCode::InvalidArgument, "feature count differs from dictionary");
  if (!X.allFinite()) throw Error(ErrorCode::NonFiniteInput, "X contains NaN/Inf");

  const Index n = X.rows();
  const Index l = X.cols();
  int max_power = 0;
  for (const auto& t : dict.terms())
    for (int e : t.exponents) max_power = std::max(max_power, e);

  // powers[j] is N x (max_power+1): column q holds X[:, j]^q.
  std::vector<Matrix> powers(static_cast<std::size_t>(l), Matrix(n, max_power + 1));
  for (Index j = 0; j < l; ++j) {
    auto& pw = powers[static_cast<std::size_t>(j)];
    pw.col(0).setOnes();
    for (int q = 1; q <= max_power; ++q) pw.col(q) = pw.col(q - 1).cwiseProduct(X.col(j));
  }

  Matrix K(n, static_cast<Index>(dict.size()));
  for (std::size_t t = 0; t < dict.size(); ++t) {
    auto col = K.col(static_cast<Index>(t));
    col.setOnes();
    const auto& e = dict.term(t).exponents;
    for (Index j = 0; j < l; ++j)
      if (e[static_cast<std::size_t>(j)] > 0) col.array() *= powers[static_cast<std::size_t>(j)].col(e[static_cast<std::size_t>(j)]).array();
  }
  return K;
}

inline std::vector<std::string> default_feature_names(int features) {
  std::vector<std::string> names;
  for (int j = 1; j <= features; ++j) names.push_back("x" + std::to_string(j));
  return names;
}

/// Human-readable monomial, e.g. (2,0,1) over (x,y,z) -> "x^2·z"; all-zero -> "1".
inline std::string term_to_string(const TermExponents& term, const std::vector<std::string>& names) {
  if (names.size() != term.exponents.size())
    throw Error(ErrorCode::InvalidArgument, "label count differs from term length");
  std::string out;
  for (std::size_t j = 0; j < names.size(); ++j) {
    const int e = term.exponents[j];
    if (e == 0) continue;
    if (!out.empty()) out += "·";
    out += names[j];
    if (e > 1) out += "^" + std::to_string(e);
  }
  return out.empty() ? "1" : out;
}

}  // namespace eqlearn
