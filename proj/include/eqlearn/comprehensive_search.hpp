#pragma once

// Comprehensive search: per model size, rank every subset of the active
// dictionary by R², rate terms by how often they appear in the top models,
// prune terms unused for two consecutive sizes, and stop once the set of
// highly rated terms repeats. The retained top models are then re-ranked by
// exact log evidence.

#include "eqlearn/error.hpp"
#include "eqlearn/problem.hpp"
#include "eqlearn/subset_ranking.hpp"
#include "eqlearn/types.hpp"

#include <chrono>
#include <set>
#include <string_view>
#include <vector>

namespace eqlearn {

struct CsParams {
  int m_max = 8;
  int s = 0;  // rating pool size; 0 selects p/2
  int t = 25;
  double c_min = 0.75;

  void validate() const {
    if (m_max < 2 || s < 0 || t < 1 || !(c_min > 0.0 && c_min <= 1.0))
      throw Error(ErrorCode::InvalidArgument, "invalid comprehensive search parameters");
  }
  std::size_t rating_pool(std::size_t p) const {
    return s > 0 ? static_cast<std::size_t>(s) : std::max<std::size_t>(1, p / 2);
  }
};

enum class StopReason {
  Converged,           // consistently rated set repeated
  NoConvergence,       // m_max reached
  ActiveSetExhausted,  // fewer active terms than the next model size
  NoValidModels,       // every subset of the next size was rank deficient
};

constexpr std::string_view to_string(StopReason r) noexcept {
  switch (r) {
    case StopReason::Converged: return "converged";
    case StopReason::NoConvergence: return "no_convergence";
    case StopReason::ActiveSetExhausted: return "active_set_exhausted";
    case StopReason::NoValidModels: return "no_valid_models";
  }
  return "unknown";
}

struct CsIteration {
  int model_size = 0;
  std::size_t active_before = 0;
  std::size_t models_evaluated = 0;
  std::size_t models_excluded = 0;
  double wall_seconds = 0.0;
  std::vector<int> pruned;
  std::vector<int> selected;  // F[:, m] >= c_min
  Vector rating;              // F[:, m]
};

struct CsDiagnostics {
  StopReason stop_reason = StopReason::NoConvergence;
  int final_model_size = 0;
  std::vector<CsIteration> iterations;
  std::vector<ModelMask> pool;        // deduplicated retained top models
  std::vector<double> pool_evidence;  // total log evidence, standardized space
  /// Model size at which the best pooled evidence first decreased (0 if never);
  /// recorded only, not used for stopping.
  int evidence_first_decrease = 0;
};

struct CsOutput {
  FitResult model_star;  // CS-R²
  FitResult model_one;   // CS-p(M)
  std::vector<RankedModels> all_top_models;
  CsDiagnostics diagnostics;
};

namespace detail {

inline ModelMask threshold_mask(const Vector& rating, double c_min) {
  ModelMask mask(static_cast<std::size_t>(rating.size()));
  for (Index i = 0; i < rating.size(); ++i)
    if (rating(i) >= c_min) mask.set(static_cast<std::size_t>(i));
  return mask;
}

}  // namespace detail

inline CsOutput cs_search(const Problem& problem, const CsParams& params, int workers = 1) {
  params.validate();
  const std::size_t p = problem.dictionary_size();
  if (p < 2) throw Error(ErrorCode::InvalidArgument, "comprehensive search needs p >= 2");

  const std::size_t s = params.rating_pool(p);
  const std::size_t t = static_cast<std::size_t>(params.t);
  const std::size_t keep = std::max(s, t);

  std::vector<int> active(p);
  for (std::size_t i = 0; i < p; ++i) active[i] = static_cast<int>(i);

  CsOutput out;
  auto& diag = out.diagnostics;
  std::set<ModelMask> seen;
  Vector previous_rating;
  ModelMask last_selected(p);
  bool converged = false;

  for (int m = 1; m <= params.m_max; ++m) {
    if (active.size() < static_cast<std::size_t>(m)) {
      diag.stop_reason = StopReason::ActiveSetExhausted;
      break;
    }
    const auto start = std::chrono::steady_clock::now();
    RankedModels ranked = top_r_squared(problem.K(), problem.y(), active, m, keep, workers);
    if (ranked.empty()) {
      diag.stop_reason = StopReason::NoValidModels;
      break;
    }

    CsIteration it;
    it.model_size = m;
    it.active_before = active.size();
    it.models_evaluated = ranked.evaluated;
    it.models_excluded = ranked.excluded;
    it.rating = rate_features(ranked, s, p);

    for (std::size_t j = 0; j < std::min(t, ranked.size()); ++j)
      if (seen.insert(ranked.masks[j]).second) diag.pool.push_back(ranked.masks[j]);

    const ModelMask selected = detail::threshold_mask(it.rating, params.c_min);
    it.selected = selected.indices();
    if (m >= 2) {
      std::vector<int> kept;
      for (int i : active) {
        if (it.rating(i) + previous_rating(i) == 0.0)
          it.pruned.push_back(i);
        else
          kept.push_back(i);
      }
      active = std::move(kept);
      const ModelMask previous_selected = detail::threshold_mask(previous_rating, params.c_min);
      if (selected == previous_selected && !selected.empty()) converged = true;
    }

    it.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    previous_rating = it.rating;
    last_selected = selected;
    diag.final_model_size = m;
    diag.iterations.push_back(std::move(it));
    out.all_top_models.push_back(std::move(ranked));
    if (converged) break;
  }
  if (diag.iterations.empty()) throw Error(ErrorCode::EmptyActiveSet, "no model size could be searched");
  diag.stop_reason = converged ? StopReason::Converged
                     : diag.final_model_size == params.m_max ? StopReason::NoConvergence
                                                             : diag.stop_reason;

  // Evidence re-ranking over every retained top model.
  diag.pool_evidence.reserve(diag.pool.size());
  std::size_t best = 0;
  for (std::size_t i = 0; i < diag.pool.size(); ++i) {
    diag.pool_evidence.push_back(problem.evidence(diag.pool[i]));
    if (diag.pool_evidence[i] > diag.pool_evidence[best]) best = i;
  }

  std::vector<double> best_by_size(static_cast<std::size_t>(diag.final_model_size) + 1, kEvidenceSentinel);
  for (std::size_t i = 0; i < diag.pool.size(); ++i) {
    auto& slot = best_by_size[diag.pool[i].size()];
    slot = std::max(slot, diag.pool_evidence[i]);
  }
  for (std::size_t m = 2; m < best_by_size.size(); ++m) {
    if (best_by_size[m] < best_by_size[m - 1]) {
      diag.evidence_first_decrease = static_cast<int>(m);
      break;
    }
  }

  out.model_star = problem.fit(last_selected);
  out.model_one = problem.fit(diag.pool[best]);
  return out;
}

inline CsOutput cs_search(const Vector& y, const Matrix& K, const CsParams& params, Preprocessing pre = {},
                          int workers = 1) {
  return cs_search(Problem(y, K, pre), params, workers);
}

}  // namespace eqlearn
