#pragma once

// Command-line front end. run() is callable in-process so tests can drive
// every subcommand without spawning a binary.

#include "eqlearn/eqlearn.hpp"
#include "eqlearn/serialize.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace eqlearn::cli {

enum ExitCode : int { kOk = 0, kInvalidArgs = 2, kBadInput = 3, kMethodFailure = 4, kEmptyBenchmark = 5 };

struct Globals {
  std::optional<std::uint64_t> seed;
  int workers = 1;
  std::string out;
  std::string format = "json";
};

/// Thrown inside commands to leave with a specific exit code.
struct Exit {
  int code;
  std::string message;
};

namespace detail {

/// Writes `text` to --out when given, otherwise to `out`.
inline void emit(const Globals& g, std::ostream& out, const std::string& text) {
  if (g.out.empty()) {
    out << text;
    return;
  }
  std::ofstream f(g.out, std::ios::binary);
  if (!f) throw Exit{kInvalidArgs, "cannot write " + g.out};
  f << text;
}

inline std::uint64_t require_seed(const Globals& g) {
  if (!g.seed) throw Exit{kInvalidArgs, "--seed is required for this subcommand"};
  return *g.seed;
}

// ---- dict ------------------------------------------------------------------

struct DictArgs {
  int features = 0;
  int m1 = 0;
  int m2 = 0;
};

inline int cmd_dict(const DictArgs& a, const Globals& g, std::ostream& out) {
  Dictionary dict;
  try {
    dict = build_dictionary(a.features, a.m1, a.m2);
  } catch (const Error& e) {
    throw Exit{kInvalidArgs, e.what()};
  }
  const auto names = default_feature_names(a.features);
  if (g.format == "csv") {
    std::ostringstream os;
    os << "index,term";
    for (const auto& n : names) os << ",e_" << n;
    os << '\n';
    for (std::size_t i = 0; i < dict.size(); ++i) {
      os << i << ',' << term_to_string(dict.term(i), names);
      for (int e : dict.term(i).exponents) os << ',' << e;
      os << '\n';
    }
    emit(g, out, os.str());
  } else {
    emit(g, out, to_json(dict, names).dump(2) + "\n");
  }
  return kOk;
}

// ---- gen -------------------------------------------------------------------

struct GenArgs {
  std::string system;
  Index n = 5000;
  double dt = 0.002;
  double sigma = 0.0;
  int size = 2;
  std::optional<Index> poly_n;
  double poly_sigma = 0.01;
};

inline int cmd_gen(const GenArgs& a, const Globals& g, std::ostream& out, std::ostream& err) {
  const std::uint64_t seed = require_seed(g);
  if (a.system == "poly") {
    PolynomialSpec spec;
    try {
      spec = gen_random_polynomial(a.size, seed);
    } catch (const Error& e) {
      throw Exit{kInvalidArgs, e.what()};
    }
    const Index n = a.poly_n.value_or(spec.n);
    if (n < 1 || a.poly_sigma < 0.0) throw Exit{kInvalidArgs, "need --n >= 1 and --sigma >= 0"};
    const PolynomialData d = gen_polynomial_data(spec, n, a.poly_sigma, seed);
    const auto names = default_feature_names(spec.dictionary.features());
    FitResult truth;
    truth.mask = spec.mask;
    truth.weights = spec.weights;
    Json info = {{"system", "poly"}, {"size", a.size}, {"n", n}, {"sigma", a.poly_sigma}, {"seed", seed}};
    info["terms"] = to_json(truth, spec.dictionary, names)["terms"];
    info["feature_means"] = std::vector<double>(spec.means.begin(), spec.means.end());
    info["feature_stds"] = std::vector<double>(spec.stds.begin(), spec.stds.end());
    err << info.dump() << '\n';

    Table t;
    t.columns = names;
    t.columns.push_back("y");
    t.values.resize(n, static_cast<Index>(names.size()) + 1);
    t.values.leftCols(static_cast<Index>(names.size())) = d.X;
    t.values.rightCols(1) = d.y;
    emit(g, out, to_csv_string(t));
    return kOk;
  }

  ScenarioConfig cfg;
  try {
    cfg.system = parse_system(a.system);
    cfg.n = a.n;
    cfg.dt = a.dt;
    cfg.sigma = a.sigma;
    cfg.seed = seed;
    cfg.validate();
  } catch (const Error& e) {
    throw Exit{kInvalidArgs, e.what()};
  }
  err << to_json(cfg).dump() << '\n';
  emit(g, out, to_csv_string(trajectory_table(simulate(cfg))));
  return kOk;
}

// ---- fit -------------------------------------------------------------------

struct FitArgs {
  std::string data;
  std::string method = "cs-r2";
  std::string mode = "regression";
  std::string target = "y";
  std::optional<double> dt;
  std::string pairing = "left";
  int m1 = 4;
  int m2 = 6;
  CsParams cs;
  std::optional<double> stlsq_threshold;
  double stlsq_alpha = 1e-5;
  int frols_max_terms = 10;
};

inline Json method_report(Method method, const Problem& problem, const MethodOptions& opt, int workers,
                          const Dictionary& dict, const std::vector<std::string>& names, FitResult& fit) {
  switch (method) {
    case Method::CsR2:
    case Method::CsPm: {
      const CsOutput cs = cs_search(problem, opt.cs, workers);
      fit = method == Method::CsR2 ? cs.model_star : cs.model_one;
      Json d = to_json(cs.diagnostics, dict, names);
      d["cs_r2_model"] = mask_json(cs.model_star.mask, dict, names);
      d["cs_pm_model"] = mask_json(cs.model_one.mask, dict, names);
      return d;
    }
    case Method::Bsr: {
      const StepwiseResult r = bsr_fit(problem, workers);
      fit = r.fit;
      return to_json(r, dict, names);
    }
    case Method::Stlsq:
    case Method::StlsqFixed: {
      Json d;
      StlsqParams params = opt.stlsq;
      if (method == Method::Stlsq) {
        const StlsqTuning tuning = tune_stlsq(problem, opt.stlsq_grid, opt.stlsq, opt.cv_folds, workers);
        params = tuning.best;
        Json cv = Json::array();
        for (std::size_t i = 0; i < tuning.thresholds.size(); ++i)
          cv.push_back({{"threshold", tuning.thresholds[i]}, {"cv_mse", number(tuning.cv_mse[i])}});
        d["cross_validation"] = cv;
      }
      const StlsqResult r = stlsq_fit(problem, params);
      fit = r.fit;
      d["threshold"] = params.threshold;
      d["alpha"] = params.alpha;
      d["iterations"] = r.iterations;
      d["converged"] = r.converged;
      d["all_terms_eliminated"] = r.all_terms_eliminated;
      d["active_sizes"] = r.active_sizes;
      return d;
    }
    case Method::Frols: {
      const FrolsResult r = frols_fit(problem, opt.frols);
      fit = r.fit;
      Json order = Json::array();
      for (std::size_t i = 0; i < r.order.size(); ++i)
        order.push_back({{"term", term_to_string(dict.term(static_cast<std::size_t>(r.order[i])), names)},
                         {"err", r.err[i]},
                         {"cumulative_err", r.cumulative[i]}});
      return {{"selection", order}};
    }
  }
  return {};
}

inline int cmd_fit(const FitArgs& a, const Globals& g, std::ostream& out) {
  Method method;
  FdPairing pairing;
  try {
    method = parse_method(a.method);
    pairing = parse_pairing(a.pairing);
    a.cs.validate();
  } catch (const Error& e) {
    throw Exit{kInvalidArgs, e.what()};
  }
  if (a.mode != "regression" && a.mode != "dynsys") throw Exit{kInvalidArgs, "--mode must be regression or dynsys"};

  Table table;
  try {
    table = read_csv_file(a.data);
  } catch (const Error& e) {
    throw Exit{kBadInput, e.what()};
  }

  std::vector<std::string> names;
  Matrix X;
  std::vector<std::pair<std::string, Vector>> targets;
  double dt_used = 0.0;
  if (a.mode == "regression") {
    const int y_col = table.find(a.target);
    if (y_col < 0) throw Exit{kBadInput, "no response column '" + a.target + "'"};
    std::vector<int> cols;
    for (std::size_t j = 0; j < table.columns.size(); ++j)
      if (static_cast<int>(j) != y_col) {
        cols.push_back(static_cast<int>(j));
        names.push_back(table.columns[j]);
      }
    if (cols.empty()) throw Exit{kBadInput, "no feature columns"};
    X = select_columns(table.values, std::span<const int>(cols));
    targets.emplace_back(a.target, table.values.col(y_col));
  } else {
    const int t_col = table.find("t");
    std::vector<int> cols;
    for (std::size_t j = 0; j < table.columns.size(); ++j)
      if (static_cast<int>(j) != t_col) {
        cols.push_back(static_cast<int>(j));
        names.push_back(table.columns[j]);
      }
    if (cols.empty() || table.values.rows() < 3) throw Exit{kBadInput, "need state columns and at least 3 rows"};
    Trajectory tr;
    tr.states = select_columns(table.values, std::span<const int>(cols));
    if (a.dt) {
      tr.dt = *a.dt;
    } else if (t_col >= 0) {
      const Vector t = table.values.col(t_col);
      tr.dt = t(1) - t(0);
      for (Index i = 1; i < t.size(); ++i)
        if (std::abs((t(i) - t(i - 1)) - tr.dt) > 1e-9 * std::max(1.0, std::abs(t(i))))
          throw Exit{kBadInput, "time column is not uniformly spaced"};
    } else {
      throw Exit{kBadInput, "dynsys mode needs a 't' column or --dt"};
    }
    if (!(tr.dt > 0.0)) throw Exit{kBadInput, "time step must be positive"};
    dt_used = tr.dt;
    tr.times = Vector::LinSpaced(tr.states.rows(), 0.0, tr.dt * static_cast<double>(tr.states.rows() - 1));
    const RegressionData rd = finite_difference(tr, pairing);
    X = rd.features;
    for (std::size_t k = 0; k < names.size(); ++k) targets.emplace_back(names[k], rd.targets.col(static_cast<Index>(k)));
  }

  Dictionary dict;
  try {
    dict = build_dictionary(static_cast<int>(names.size()), a.m1, a.m2);
  } catch (const Error& e) {
    throw Exit{kInvalidArgs, e.what()};
  }

  MethodOptions opt;
  opt.cs = a.cs;
  opt.stlsq.alpha = a.stlsq_alpha;
  if (a.stlsq_threshold) {
    opt.stlsq.threshold = *a.stlsq_threshold;
    if (method == Method::Stlsq) method = Method::StlsqFixed;
  }
  opt.frols.max_terms = a.frols_max_terms;

  Json report = {{"method", std::string(to_string(method))},
                 {"mode", a.mode},
                 {"data", a.data},
                 {"samples", X.rows()},
                 {"dictionary",
                  {{"features", dict.features()}, {"max_individual_power", a.m1}, {"max_collective_power", a.m2}, {"p", dict.size()}}}};
  if (a.mode == "dynsys") {
    report["dt"] = dt_used;
    report["pairing"] = std::string(to_string(pairing));
  }

  Json fits = Json::array();
  std::vector<std::array<std::string, 3>> rows;  // csv: target, term, weight
  try {
    const Matrix K = evaluate_dictionary(X, dict);
    for (const auto& [name, y] : targets) {
      const Problem problem(y, K);
      FitResult fit;
      Json diag = method_report(method, problem, opt, g.workers, dict, names, fit);
      fits.push_back({{"target", name}, {"fit", to_json(fit, dict, names)}, {"diagnostics", diag}});
      const auto idx = fit.mask.indices();
      for (std::size_t j = 0; j < idx.size(); ++j)
        rows.push_back({name, term_to_string(dict.term(static_cast<std::size_t>(idx[j])), names),
                        format_double(fit.weights(static_cast<Index>(j)))});
    }
  } catch (const Error& e) {
    report["status"] = "error";
    report["error"] = {{"code", std::string(to_string(e.code()))}, {"message", e.what()}};
    emit(g, out, report.dump(2) + "\n");
    return kMethodFailure;
  }
  report["status"] = "ok";
  report["targets"] = fits;

  if (g.format == "csv") {
    std::ostringstream os;
    os << "target,term,weight\n";
    for (const auto& r : rows) os << r[0] << ',' << r[1] << ',' << r[2] << '\n';
    emit(g, out, os.str());
  } else {
    emit(g, out, report.dump(2) + "\n");
  }
  return kOk;
}

// ---- bench -----------------------------------------------------------------

struct BenchArgs {
  std::string config;
  std::vector<std::string> methods;
};

inline std::vector<Scenario> scenarios_from_config(const Json& cfg, std::ostream& err) {
  std::vector<Scenario> out;
  if (cfg.contains("grid")) {
    const Json& grid = cfg["grid"];
    if (grid.is_string()) {
      const std::string name = grid.get<std::string>();
      if (name == "lorenz-default")
        out = lorenz_default_grid();
      else if (name == "rf-default")
        out = rf_default_grid();
      else
        throw Exit{kBadInput, "unknown grid '" + name + "'"};
    } else {
      out = expand_grid(parse_system(grid.at("system").get<std::string>()), grid.at("n").get<std::vector<Index>>(),
                        grid.at("dt").get<std::vector<double>>(), grid.at("sigma").get<std::vector<double>>());
    }
  }
  if (cfg.contains("scenarios")) {
    for (const auto& s : cfg["scenarios"]) {
      ScenarioConfig c;
      c.system = parse_system(s.value("system", "lorenz"));
      c.n = s.at("n").get<Index>();
      c.dt = s.at("dt").get<double>();
      c.sigma = s.value("sigma", 0.0);
      try {
        c.validate();
      } catch (const Error& e) {
        err << "skipping scenario: " << e.what() << '\n';
        continue;
      }
      out.push_back({s.value("id", scenario_id(c)), c});
    }
  }
  return out;
}

inline MethodOptions method_options_from_config(const Json& cfg) {
  MethodOptions opt;
  if (cfg.contains("cs")) {
    const Json& c = cfg["cs"];
    opt.cs.m_max = c.value("m_max", opt.cs.m_max);
    opt.cs.s = c.value("s", opt.cs.s);
    opt.cs.t = c.value("t", opt.cs.t);
    opt.cs.c_min = c.value("c_min", opt.cs.c_min);
  }
  if (cfg.contains("stlsq")) {
    const Json& c = cfg["stlsq"];
    opt.stlsq.threshold = c.value("threshold", opt.stlsq.threshold);
    opt.stlsq.alpha = c.value("alpha", opt.stlsq.alpha);
    opt.stlsq.max_iters = c.value("max_iters", opt.stlsq.max_iters);
    opt.stlsq_grid = c.value("grid", opt.stlsq_grid);
    opt.cv_folds = c.value("folds", opt.cv_folds);
  }
  if (cfg.contains("frols")) {
    const Json& c = cfg["frols"];
    opt.frols.max_terms = c.value("max_terms", opt.frols.max_terms);
    opt.frols.err_tolerance = c.value("err_tolerance", opt.frols.err_tolerance);
  }
  opt.cs.validate();
  opt.stlsq.validate();
  opt.frols.validate();
  return opt;
}

inline int cmd_bench(const BenchArgs& a, const Globals& g, std::ostream& out, std::ostream& err) {
  Json cfg;
  {
    std::ifstream f(a.config);
    if (!f) throw Exit{kBadInput, "cannot open config " + a.config};
    try {
      cfg = Json::parse(f);
    } catch (const std::exception& e) {
      throw Exit{kBadInput, std::string("malformed config: ") + e.what()};
    }
  }
  if (g.out.empty()) throw Exit{kInvalidArgs, "--out <dir> is required for bench"};

  std::vector<Scenario> scenarios;
  std::vector<NamedLearner> learners;
  BenchOptions opt;
  try {
    scenarios = scenarios_from_config(cfg, err);
    std::vector<std::string> methods = a.methods;
    if (methods.empty()) methods = cfg.value("methods", std::vector<std::string>{});
    if (methods.empty()) throw Exit{kInvalidArgs, "no methods given"};
    const MethodOptions mopt = method_options_from_config(cfg);
    for (const auto& m : methods) learners.push_back(builtin_learner(parse_method(m), mopt));

    if (g.seed)
      opt.master_seed = *g.seed;
    else if (cfg.contains("master_seed"))
      opt.master_seed = cfg["master_seed"].get<std::uint64_t>();
    else
      throw Exit{kInvalidArgs, "--seed or master_seed is required for bench"};
    opt.n_initial = cfg.value("n_initial", opt.n_initial);
    opt.forecast_dt = cfg.value("forecast_dt", opt.forecast_dt);
    if (cfg.contains("horizon")) opt.horizon = cfg["horizon"].get<double>();
    opt.pairing = parse_pairing(cfg.value("pairing", std::string("left")));
    opt.workers = g.workers;
  } catch (const Error& e) {
    throw Exit{kInvalidArgs, e.what()};
  } catch (const nlohmann::json::exception& e) {
    throw Exit{kBadInput, std::string("config: ") + e.what()};
  }
  if (scenarios.empty()) throw Exit{kEmptyBenchmark, "zero scenarios to execute"};

  const BenchResults results = run_scenario_grid(scenarios, learners, opt);

  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(g.out, ec);
  if (ec) throw Exit{kInvalidArgs, "cannot create " + g.out};
  {
    std::ofstream f(fs::path(g.out) / "results.csv", std::ios::binary);
    write_results_csv(f, results);
  }
  {
    std::ofstream f(fs::path(g.out) / "summary.json", std::ios::binary);
    f << summary_json(results, opt.master_seed).dump(2) << '\n';
  }

  out << std::left << std::setw(12) << "method" << std::setw(8) << "cells" << std::setw(8) << "failed"
      << std::setw(12) << "unsolvable" << std::setw(14) << "eq_correct" << "median_mae\n";
  for (const auto& s : summarize(results)) {
    const BoxStats& eq = s.metrics[0].second;
    const BoxStats& mae = s.metrics[3].second;
    out << std::setw(12) << s.method << std::setw(8) << s.cells << std::setw(8) << s.failed_cells << std::setw(12)
        << s.unsolvable_total << std::setw(14) << format_double(eq.mean) << format_double(mae.median) << '\n';
  }
  return kOk;
}

}  // namespace detail

/// Parses `args` (without the program name) and runs the subcommand.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sparse equation learning from data"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--seed", g.seed, "Master seed (u64)");
  app.add_option("--workers", g.workers, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--out", g.out, "Output file (dict, gen, fit) or directory (bench)");
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"json", "csv"}));

  detail::DictArgs dict_args;
  auto* dict = app.add_subcommand("dict", "List dictionary terms");
  dict->add_option("--features", dict_args.features, "Feature count l")->required();
  dict->add_option("--m1", dict_args.m1, "Maximum individual power")->required();
  dict->add_option("--m2", dict_args.m2, "Maximum collective power")->required();

  detail::GenArgs gen_args;
  std::optional<Index> gen_n;
  std::optional<double> gen_sigma;
  auto* gen = app.add_subcommand("gen", "Generate data");
  gen->add_option("system", gen_args.system, "lorenz | rf | poly")->required()->check(CLI::IsMember({"lorenz", "rf", "poly"}));
  gen->add_option("--n", gen_n, "Sample count");
  gen->add_option("--dt", gen_args.dt, "Time step");
  gen->add_option("--sigma", gen_sigma, "Noise standard deviation");
  gen->add_option("--size", gen_args.size, "Polynomial term count (poly)");

  detail::FitArgs fit_args;
  std::optional<int> s_override;
  auto* fit = app.add_subcommand("fit", "Learn equations from a CSV file");
  fit->add_option("--data", fit_args.data, "Input CSV")->required();
  fit->add_option("--method", fit_args.method, "cs-r2 | cs-pm | bsr | stlsq | stlsq-fixed | frols");
  fit->add_option("--mode", fit_args.mode, "regression | dynsys");
  fit->add_option("--target", fit_args.target, "Response column (regression)");
  fit->add_option("--dt", fit_args.dt, "Time step (dynsys, when no t column)");
  fit->add_option("--pairing", fit_args.pairing, "left | midpoint (dynsys)");
  fit->add_option("--m1", fit_args.m1, "Maximum individual power");
  fit->add_option("--m2", fit_args.m2, "Maximum collective power");
  fit->add_option("--m-max", fit_args.cs.m_max, "CS maximum model size");
  fit->add_option("--s", s_override, "CS rating pool size (default p/2)");
  fit->add_option("--t", fit_args.cs.t, "CS models kept per size for the evidence pool");
  fit->add_option("--c-min", fit_args.cs.c_min, "CS rating threshold");
  fit->add_option("--threshold", fit_args.stlsq_threshold, "Fixed STLSQ threshold (skips tuning)");
  fit->add_option("--alpha", fit_args.stlsq_alpha, "STLSQ ridge penalty");
  fit->add_option("--max-terms", fit_args.frols_max_terms, "FROLS maximum terms");

  detail::BenchArgs bench_args;
  auto* bench = app.add_subcommand("bench", "Run a scenario x method benchmark");
  bench->add_option("--config", bench_args.config, "JSON config")->required();
  bench->add_option("--methods", bench_args.methods, "Comma-separated method list")->delimiter(',');

  std::vector<const char*> argv{"eqlearn"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInvalidArgs;
  }

  try {
    if (*dict) return detail::cmd_dict(dict_args, g, out);
    if (*gen) {
      if (gen_args.system == "poly") {
        gen_args.poly_n = gen_n;
        if (gen_sigma) gen_args.poly_sigma = *gen_sigma;
      } else {
        if (gen_n) gen_args.n = *gen_n;
        if (gen_sigma) gen_args.sigma = *gen_sigma;
      }
      return detail::cmd_gen(gen_args, g, out, err);
    }
    if (*fit) {
      if (s_override) fit_args.cs.s = *s_override;
      return detail::cmd_fit(fit_args, g, out);
    }
    if (*bench) return detail::cmd_bench(bench_args, g, out, err);
  } catch (const Exit& e) {
    err << "error: " << e.message << '\n';
    return e.code;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kMethodFailure;
  }
  return kInvalidArgs;
}

}  // namespace eqlearn::cli
