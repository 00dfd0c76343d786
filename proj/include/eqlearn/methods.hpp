#pragma once

// Name-based dispatch over the model-selection methods.

#include "eqlearn/baselines.hpp"
#include "eqlearn/comprehensive_search.hpp"
#include "eqlearn/error.hpp"
#include "eqlearn/problem.hpp"
#include "eqlearn/stepwise.hpp"

#include <array>
#include <string>
#include <string_view>
#include <vector>

namespace eqlearn {

enum class Method { CsR2, CsPm, Bsr, Stlsq, StlsqFixed, Frols };

inline constexpr std::array<std::string_view, 6> kMethodNames = {"cs-r2", "cs-pm", "bsr", "stlsq", "stlsq-fixed", "frols"};

constexpr std::string_view to_string(Method m) noexcept { return kMethodNames[static_cast<std::size_t>(m)]; }

inline Method parse_method(std::string_view name) {
  for (std::size_t i = 0; i < kMethodNames.size(); ++i)
    if (kMethodNames[i] == name) return static_cast<Method>(i);
  throw Error(ErrorCode::InvalidArgument, "unknown method '" + std::string(name) + "'");
}

/// Log-spaced default STLSQ threshold grid, 1e-3 .. 10.
inline std::vector<double> default_stlsq_grid() {
  return {1e-3, 3e-3, 1e-2, 3e-2, 0.1, 0.3, 1.0, 3.0, 10.0};
}

struct MethodOptions {
  CsParams cs;
  StlsqParams stlsq;
  std::vector<double> stlsq_grid = default_stlsq_grid();
  int cv_folds = 5;
  FrolsParams frols;
};

/// "stlsq" tunes its threshold by k-fold CV; "stlsq-fixed" uses options.stlsq.
inline FitResult run_method(Method method, const Problem& problem, const MethodOptions& opt = {}, int workers = 1) {
  switch (method) {
    case Method::CsR2: return cs_search(problem, opt.cs, workers).model_star;
    case Method::CsPm: return cs_search(problem, opt.cs, workers).model_one;
    case Method::Bsr: return bsr_fit(problem, workers).fit;
    case Method::Stlsq: {
      const auto tuned = tune_stlsq(problem, opt.stlsq_grid, opt.stlsq, opt.cv_folds, workers);
      return stlsq_fit(problem, tuned.best).fit;
    }
    case Method::StlsqFixed: return stlsq_fit(problem, opt.stlsq).fit;
    case Method::Frols: return frols_fit(problem, opt.frols).fit;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown method");
}

}  // namespace eqlearn
