#pragma once

// Bi-directional stepwise regression scored by exact log evidence: greedy
// forward additions until evidence stops rising, then greedy removals, and
// alternate until neither direction improves.

#include "eqlearn/parallel.hpp"
#include "eqlearn/problem.hpp"
#include "eqlearn/types.hpp"

#include <string_view>
#include <vector>

namespace eqlearn {

/// Minimum log-evidence gain for a step to count as an improvement.
inline constexpr double kStepwiseTolerance = 1e-9;

struct StepwiseStep {
  enum class Action { Add, Remove };
  Action action;
  int term;
  double log_evidence;
};

constexpr std::string_view to_string(StepwiseStep::Action a) noexcept {
  return a == StepwiseStep::Action::Add ? "add" : "remove";
}

struct StepwiseResult {
  FitResult fit;
  double initial_log_evidence = 0.0;
  std::vector<StepwiseStep> trace;
  bool hit_step_cap = false;
};

namespace detail {

/// Best single-term toggle among `candidates`; ties go to the smallest index.
inline std::pair<int, double> best_toggle(const Problem& problem, const ModelMask& mask,
                                          const std::vector<int>& candidates, int workers) {
  std::vector<double> scores(candidates.size());
  parallel_for(candidates.size(), workers, [&](std::size_t i, std::size_t) {
    ModelMask trial = mask;
    trial.flip(static_cast<std::size_t>(candidates[i]));
    scores[i] = problem.evidence(trial);
  });
  int best = -1;
  double best_score = kEvidenceSentinel;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (best < 0 || scores[i] > best_score) {
      best = candidates[i];
      best_score = scores[i];
    }
  }
  return {best, best_score};
}

}  // namespace detail

inline StepwiseResult bsr_fit(const Problem& problem, int workers = 1) {
  const std::size_t p = problem.dictionary_size();
  const std::size_t cap = 4 * std::max<std::size_t>(p, 1);

  StepwiseResult out;
  ModelMask mask(p);
  double current = problem.evidence(mask);
  out.initial_log_evidence = current;

  auto phase = [&](bool forward) {
    bool changed = false;
    while (out.trace.size() < cap) {
      std::vector<int> candidates;
      for (std::size_t i = 0; i < p; ++i)
        if (mask.test(i) != forward) candidates.push_back(static_cast<int>(i));
      if (candidates.empty()) break;
      const auto [term, score] = detail::best_toggle(problem, mask, candidates, workers);
      if (!(score > current + kStepwiseTolerance)) break;
      mask.flip(static_cast<std::size_t>(term));
      current = score;
      out.trace.push_back({forward ? StepwiseStep::Action::Add : StepwiseStep::Action::Remove, term, score});
      changed = true;
    }
    return changed;
  };

  while (true) {
    const bool added = phase(true);
    const bool removed = phase(false);
    if (out.trace.size() >= cap) {
      out.hit_step_cap = true;
      break;
    }
    if (!added && !removed) break;
  }

  out.fit = problem.fit(mask);
  return out;
}

inline StepwiseResult bsr_fit(const Vector& y, const Matrix& K, Preprocessing pre = {}, int workers = 1) {
  return bsr_fit(Problem(y, K, pre), workers);
}

}  // namespace eqlearn
