#pragma once

// Scenario x method sweeps over simulated dynamical systems: per-equation
// learning, identification and forecast metrics, long-format results and
// box-plot summaries.

#include "eqlearn/dictionary.hpp"
#include "eqlearn/dynsys.hpp"
#include "eqlearn/error.hpp"
#include "eqlearn/experiments.hpp"
#include "eqlearn/io.hpp"
#include "eqlearn/methods.hpp"
#include "eqlearn/parallel.hpp"
#include "eqlearn/problem.hpp"
#include "eqlearn/random.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace eqlearn {

struct Scenario {
  std::string id;
  ScenarioConfig config;
};

inline std::string scenario_id(const ScenarioConfig& c) {
  return std::string(to_string(c.system)) + "_N" + std::to_string(c.n) + "_dt" + format_double(c.dt) + "_s" +
         format_double(c.sigma);
}

/// Cartesian grid over N, dt and sigma, dropping combinations whose duration
/// is below the system minimum.
inline std::vector<Scenario> expand_grid(SystemId system, const std::vector<Index>& ns, const std::vector<double>& dts,
                                         const std::vector<double>& sigmas) {
  std::vector<Scenario> out;
  for (Index n : ns)
    for (double dt : dts)
      for (double sigma : sigmas) {
        ScenarioConfig c{system, n, dt, sigma, 0};
        try {
          c.validate();
        } catch (const Error&) {
          continue;
        }
        out.push_back({scenario_id(c), c});
      }
  return out;
}

inline std::vector<Scenario> lorenz_default_grid() {
  return expand_grid(SystemId::Lorenz, {200, 1000, 5000, 10000}, {0.001, 0.002, 0.01, 0.1}, {0.001, 0.01, 0.05, 0.1});
}

inline std::vector<Scenario> rf_default_grid() {
  return expand_grid(SystemId::RabinovichFabrikant, {1000, 2000, 4000, 8000, 16000},
                     {0.001, 0.002, 0.005, 0.01, 0.02, 0.05, 0.1}, {1e-4, 1e-2});
}

struct LearnContext {
  const Scenario& scenario;
  int equation;
  std::uint64_t seed;
};

/// Fits one equation of one scenario.
using Learner = std::function<FitResult(const Problem&, const LearnContext&)>;

struct NamedLearner {
  std::string name;
  Learner learn;
};

inline NamedLearner builtin_learner(Method m, MethodOptions options = {}) {
  return {std::string(to_string(m)),
          [m, options](const Problem& p, const LearnContext&) { return run_method(m, p, options, 1); }};
}

struct BenchOptions {
  std::uint64_t master_seed = 0;
  int n_initial = 10;
  double forecast_dt = 0.01;
  std::optional<double> horizon;  // default_horizon(system) when empty
  FdPairing pairing = FdPairing::LeftEndpoint;
  int workers = 1;
};

struct CellResult {
  std::string scenario_id;
  std::string method;
  bool ok = false;
  std::string error;
  std::vector<std::pair<std::string, double>> metrics;
  OdeSystem learnt;

  std::optional<double> metric(const std::string& name) const {
    for (const auto& [k, v] : metrics)
      if (k == name) return v;
    return std::nullopt;
  }
};

struct BenchResults {
  std::vector<Scenario> scenarios;
  std::vector<std::string> methods;
  std::vector<CellResult> cells;  // scenario-major, then method
};

namespace detail {

inline CellResult run_cell(const Scenario& scenario, const NamedLearner& learner, const Dictionary& dict,
                           const Matrix& initial_values, const BenchOptions& opt) {
  CellResult cell;
  cell.scenario_id = scenario.id;
  cell.method = learner.name;
  try {
    ScenarioConfig cfg = scenario.config;
    cfg.seed = derive_seed(opt.master_seed, {scenario.id, "data"});
    const Trajectory tr = simulate(cfg);
    const RegressionData data = finite_difference(tr, opt.pairing);
    const Matrix K = evaluate_dictionary(data.features, dict);
    const OdeSystem truth = true_system(cfg.system);

    std::vector<FitResult> fits;
    int diff = 0;
    for (int k = 0; k < truth.dimension(); ++k) {
      const Problem problem(data.targets.col(k), K);
      const LearnContext ctx{scenario, k, derive_seed(opt.master_seed, {scenario.id, learner.name})};
      FitResult fit = learner.learn(problem, ctx);
      diff += n_diff(truth.mask(k, dict), fit.mask);
      fits.push_back(std::move(fit));
    }
    cell.learnt = OdeSystem::from_fits(dict, fits);

    const double horizon = opt.horizon.value_or(default_horizon(cfg.system));
    const ForecastResult fc = forecast_mae(truth, cell.learnt, initial_values, opt.forecast_dt, horizon);
    const double size = static_cast<double>(system_size(cell.learnt));
    cell.metrics = {
        {"equations_correct", equations_correct(truth, cell.learnt)},
        {"n_diff", diff},
        {"model_size", size},
        {"mae", fc.mae},
        {"model_size_weighted_mae", size * fc.mae},
        {"unsolvable_count", fc.unsolvable_count},
        {"solvable_count", fc.solvable_count},
    };
    cell.ok = true;
  } catch (const std::exception& e) {
    cell.ok = false;
    cell.error = e.what();
    cell.metrics = {{"failed", 1.0}};
  }
  return cell;
}

}  // namespace detail

/// Runs every (scenario, method) cell. Failures are recorded per cell and
/// never abort the sweep; results do not depend on opt.workers.
inline BenchResults run_scenario_grid(const std::vector<Scenario>& scenarios, const std::vector<NamedLearner>& learners,
                                      const BenchOptions& opt) {
  if (opt.n_initial < 0) throw Error(ErrorCode::InvalidArgument, "n_initial must be >= 0");
  BenchResults out;
  out.scenarios = scenarios;
  for (const auto& l : learners) out.methods.push_back(l.name);
  if (scenarios.empty() || learners.empty()) return out;

  const Dictionary dict = search_dictionary();
  std::map<SystemId, Matrix> initial_values;
  for (const auto& s : scenarios)
    if (!initial_values.count(s.config.system))
      initial_values[s.config.system] =
          sample_attractor(s.config.system, opt.n_initial,
                           derive_seed(opt.master_seed, {"initial-values", to_string(s.config.system)}));

  out.cells.resize(scenarios.size() * learners.size());
  parallel_for(out.cells.size(), opt.workers, [&](std::size_t task, std::size_t) {
    const auto& scenario = scenarios[task / learners.size()];
    const auto& learner = learners[task % learners.size()];
    out.cells[task] = detail::run_cell(scenario, learner, dict, initial_values.at(scenario.config.system), opt);
  });
  return out;
}

inline void write_results_csv(std::ostream& os, const BenchResults& r) {
  os << "scenario_id,method,metric,value\n";
  for (const auto& c : r.cells)
    for (const auto& [name, value] : c.metrics)
      os << c.scenario_id << ',' << c.method << ',' << name << ',' << format_double(value) << '\n';
}

inline std::string results_csv(const BenchResults& r) {
  std::ostringstream os;
  write_results_csv(os, r);
  return os.str();
}

/// Quartiles by linear interpolation between order statistics; whiskers at
/// the most extreme values within 1.5 IQR of the box.
struct BoxStats {
  std::size_t count = 0;
  double mean = std::numeric_limits<double>::quiet_NaN();
  double min = mean, q1 = mean, median = mean, q3 = mean, max = mean;
  double whisker_low = mean, whisker_high = mean;
};

inline double quantile_sorted(const std::vector<double>& v, double q) {
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

/// Statistics over the finite entries of `values`.
inline BoxStats box_stats(std::vector<double> values) {
  std::erase_if(values, [](double v) { return !std::isfinite(v); });
  BoxStats b;
  b.count = values.size();
  if (values.empty()) return b;
  std::sort(values.begin(), values.end());
  double sum = 0.0;
  for (double v : values) sum += v;
  b.mean = sum / static_cast<double>(values.size());
  b.min = values.front();
  b.max = values.back();
  b.q1 = quantile_sorted(values, 0.25);
  b.median = quantile_sorted(values, 0.5);
  b.q3 = quantile_sorted(values, 0.75);
  const double iqr = b.q3 - b.q1;
  const double lo_fence = b.q1 - 1.5 * iqr;
  const double hi_fence = b.q3 + 1.5 * iqr;
  b.whisker_low = *std::find_if(values.begin(), values.end(), [&](double v) { return v >= lo_fence; });
  b.whisker_high = *std::find_if(values.rbegin(), values.rend(), [&](double v) { return v <= hi_fence; });
  return b;
}

struct MethodSummary {
  std::string method;
  std::size_t cells = 0;
  std::size_t failed_cells = 0;
  long unsolvable_total = 0;
  std::vector<std::pair<std::string, BoxStats>> metrics;
};

inline std::vector<MethodSummary> summarize(const BenchResults& r) {
  static const std::vector<std::string> kMetrics = {"equations_correct", "n_diff", "model_size", "mae",
                                                    "model_size_weighted_mae"};
  std::vector<MethodSummary> out;
  for (const auto& method : r.methods) {
    MethodSummary s;
    s.method = method;
    std::map<std::string, std::vector<double>> values;
    for (const auto& c : r.cells) {
      if (c.method != method) continue;
      ++s.cells;
      if (!c.ok) {
        ++s.failed_cells;
        continue;
      }
      s.unsolvable_total += static_cast<long>(c.metric("unsolvable_count").value_or(0.0));
      for (const auto& name : kMetrics) values[name].push_back(c.metric(name).value_or(std::nan("")));
    }
    for (const auto& name : kMetrics) s.metrics.emplace_back(name, box_stats(values[name]));
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace eqlearn
