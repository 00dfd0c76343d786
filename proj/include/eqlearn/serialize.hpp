#pragma once

// JSON views of library results (nlohmann::json).

#include "eqlearn/benchmark.hpp"
#include "eqlearn/comprehensive_search.hpp"
#include "eqlearn/dictionary.hpp"
#include "eqlearn/dynsys.hpp"
#include "eqlearn/stepwise.hpp"
#include "eqlearn/types.hpp"

#include <json.hpp>

#include <cmath>
#include <string>
#include <vector>

namespace eqlearn {

using Json = nlohmann::ordered_json;

/// Non-finite numbers become null.
inline Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

inline Json to_json(const Dictionary& dict, const std::vector<std::string>& names) {
  Json terms = Json::array();
  for (std::size_t i = 0; i < dict.size(); ++i)
    terms.push_back({{"index", i}, {"term", term_to_string(dict.term(i), names)}, {"exponents", dict.term(i).exponents}});
  return {{"features", dict.features()},
          {"max_individual_power", dict.max_individual_power()},
          {"max_collective_power", dict.max_collective_power()},
          {"p", dict.size()},
          {"terms", terms}};
}

inline Json mask_json(const ModelMask& mask, const Dictionary& dict, const std::vector<std::string>& names) {
  Json out = Json::array();
  for (int i : mask.indices())
    out.push_back({{"index", i}, {"term", term_to_string(dict.term(static_cast<std::size_t>(i)), names)}});
  return out;
}

inline Json to_json(const FitResult& fit, const Dictionary& dict, const std::vector<std::string>& names) {
  Json terms = Json::array();
  const auto idx = fit.mask.indices();
  for (std::size_t j = 0; j < idx.size(); ++j) {
    const auto& term = dict.term(static_cast<std::size_t>(idx[j]));
    terms.push_back({{"term", term_to_string(term, names)},
                     {"exponents", term.exponents},
                     {"weight", number(fit.weights(static_cast<Index>(j)))}});
  }
  return {{"terms", terms},
          {"model_size", idx.size()},
          {"r_squared", number(fit.r_squared)},
          {"sigma_hat_sq", number(fit.sigma_hat_sq)},
          {"log_evidence", fit.log_evidence ? number(*fit.log_evidence) : Json(nullptr)}};
}

inline Json to_json(const CsDiagnostics& d, const Dictionary& dict, const std::vector<std::string>& names) {
  Json iterations = Json::array();
  for (const auto& it : d.iterations) {
    Json selected = Json::array();
    for (int i : it.selected) selected.push_back(term_to_string(dict.term(static_cast<std::size_t>(i)), names));
    Json pruned = Json::array();
    for (int i : it.pruned) pruned.push_back(term_to_string(dict.term(static_cast<std::size_t>(i)), names));
    iterations.push_back({{"model_size", it.model_size},
                          {"active_before", it.active_before},
                          {"models_evaluated", it.models_evaluated},
                          {"models_excluded", it.models_excluded},
                          {"selected", selected},
                          {"pruned", pruned}});
  }
  return {{"stop_reason", std::string(to_string(d.stop_reason))},
          {"final_model_size", d.final_model_size},
          {"pool_size", d.pool.size()},
          {"evidence_first_decrease", d.evidence_first_decrease},
          {"iterations", iterations}};
}

inline Json to_json(const StepwiseResult& r, const Dictionary& dict, const std::vector<std::string>& names) {
  Json trace = Json::array();
  for (const auto& s : r.trace)
    trace.push_back({{"action", std::string(to_string(s.action))},
                     {"term", term_to_string(dict.term(static_cast<std::size_t>(s.term)), names)},
                     {"log_evidence", number(s.log_evidence)}});
  return {{"initial_log_evidence", number(r.initial_log_evidence)}, {"trace", trace}, {"hit_step_cap", r.hit_step_cap}};
}

inline Json to_json(const ScenarioConfig& c) {
  return {{"system", std::string(to_string(c.system))},
          {"n", c.n},
          {"dt", c.dt},
          {"sigma", c.sigma},
          {"duration", c.duration()},
          {"seed", c.seed}};
}

inline Json to_json(const BoxStats& b) {
  return {{"count", b.count},          {"mean", number(b.mean)},
          {"min", number(b.min)},      {"q1", number(b.q1)},
          {"median", number(b.median)}, {"q3", number(b.q3)},
          {"max", number(b.max)},      {"whisker_low", number(b.whisker_low)},
          {"whisker_high", number(b.whisker_high)}};
}

inline Json summary_json(const BenchResults& r, std::uint64_t master_seed) {
  Json methods = Json::object();
  for (const auto& s : summarize(r)) {
    Json metrics = Json::object();
    for (const auto& [name, stats] : s.metrics) metrics[name] = to_json(stats);
    methods[s.method] = {{"cells", s.cells},
                         {"failed_cells", s.failed_cells},
                         {"unsolvable_total", s.unsolvable_total},
                         {"metrics", metrics}};
  }
  Json failures = Json::array();
  for (const auto& c : r.cells)
    if (!c.ok) failures.push_back({{"scenario_id", c.scenario_id}, {"method", c.method}, {"error", c.error}});
  return {{"master_seed", master_seed}, {"scenarios", r.scenarios.size()}, {"methods", methods}, {"failures", failures}};
}

}  // namespace eqlearn
