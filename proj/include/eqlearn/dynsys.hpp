#pragma once

// Polynomial ODE systems, fixed-step RK4 integration with a divergence guard,
// forward-difference regression targets and state noise.

#include "eqlearn/dictionary.hpp"
#include "eqlearn/error.hpp"
#include "eqlearn/io.hpp"
#include "eqlearn/random.hpp"
#include "eqlearn/types.hpp"

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace eqlearn {

/// Any state component beyond this magnitude counts as divergence.
inline constexpr double kDivergenceBound = 1e6;

struct PolynomialTerm {
  TermExponents term;
  double weight = 0.0;
};

/// dx_k/dt = sum of weight * monomial over equations[k].
class OdeSystem {
 public:
  OdeSystem() = default;
  explicit OdeSystem(std::vector<std::vector<PolynomialTerm>> equations) : equations_(std::move(equations)) {
    for (const auto& eq : equations_)
      for (const auto& t : eq)
        if (static_cast<int>(t.term.features()) != dimension())
          throw Error(ErrorCode::InvalidArgument, "term length differs from system dimension");
  }

  int dimension() const noexcept { return static_cast<int>(equations_.size()); }
  const std::vector<std::vector<PolynomialTerm>>& equations() const noexcept { return equations_; }
  const std::vector<PolynomialTerm>& equation(int k) const { return equations_[static_cast<std::size_t>(k)]; }

  void eval(const Vector& x, Vector& dx) const {
    dx.resize(dimension());
    for (int k = 0; k < dimension(); ++k) {
      double acc = 0.0;
      for (const auto& t : equations_[static_cast<std::size_t>(k)]) {
        double v = t.weight;
        for (int j = 0; j < dimension(); ++j)
          for (int e = 0; e < t.term.exponents[static_cast<std::size_t>(j)]; ++e) v *= x(j);
        acc += v;
      }
      dx(k) = acc;
    }
  }

  Vector operator()(const Vector& x) const {
    Vector dx;
    eval(x, dx);
    return dx;
  }

  /// Terms of equation k as a mask over `dict`; throws if a term is missing.
  ModelMask mask(int k, const Dictionary& dict) const {
    ModelMask m(dict.size());
    for (const auto& t : equation(k)) {
      const int pos = dict.find(t.term);
      if (pos < 0) throw Error(ErrorCode::InvalidArgument, "system term not in dictionary");
      if (t.weight != 0.0) m.set(static_cast<std::size_t>(pos));
    }
    return m;
  }

  /// System whose equation k uses the dictionary terms of fits[k].
  static OdeSystem from_fits(const Dictionary& dict, const std::vector<FitResult>& fits) {
    std::vector<std::vector<PolynomialTerm>> eqs;
    for (const auto& fit : fits) {
      std::vector<PolynomialTerm> eq;
      const auto idx = fit.mask.indices();
      for (std::size_t j = 0; j < idx.size(); ++j)
        eq.push_back({dict.term(static_cast<std::size_t>(idx[j])), fit.weights(static_cast<Index>(j))});
      eqs.push_back(std::move(eq));
    }
    return OdeSystem(std::move(eqs));
  }

 private:
  std::vector<std::vector<PolynomialTerm>> equations_;
};

struct LorenzParams {
  double epsilon = 10.0;
  double rho = 28.0;
  double beta = 8.0 / 3.0;
};

struct RfParams {
  double alpha = 0.14;
  double gamma = 0.1;
};

inline Vector lorenz_rhs(const Vector& s, const LorenzParams& p = {}) {
  Vector d(3);
  d << p.epsilon * (s(1) - s(0)), s(0) * (p.rho - s(2)) - s(1), s(0) * s(1) - p.beta * s(2);
  return d;
}

inline Vector rf_rhs(const Vector& s, double alpha = 0.14, double gamma = 0.1) {
  const double x = s(0), y = s(1), z = s(2);
  Vector d(3);
  d << y * (z - 1.0 + x * x) + gamma * x, x * (3.0 * z + 1.0 - x * x) + gamma * y, -2.0 * z * (alpha + x * y);
  return d;
}

namespace detail {
inline TermExponents mono(int a, int b, int c) { return TermExponents{{a, b, c}}; }
}  // namespace detail

inline OdeSystem lorenz_system(const LorenzParams& p = {}) {
  using detail::mono;
  return OdeSystem({
      {{mono(1, 0, 0), -p.epsilon}, {mono(0, 1, 0), p.epsilon}},
      {{mono(1, 0, 0), p.rho}, {mono(0, 1, 0), -1.0}, {mono(1, 0, 1), -1.0}},
      {{mono(0, 0, 1), -p.beta}, {mono(1, 1, 0), 1.0}},
  });
}

inline OdeSystem rf_system(const RfParams& p = {}) {
  using detail::mono;
  return OdeSystem({
      {{mono(1, 0, 0), p.gamma}, {mono(0, 1, 0), -1.0}, {mono(0, 1, 1), 1.0}, {mono(2, 1, 0), 1.0}},
      {{mono(1, 0, 0), 1.0}, {mono(0, 1, 0), p.gamma}, {mono(1, 0, 1), 3.0}, {mono(3, 0, 0), -1.0}},
      {{mono(0, 0, 1), -2.0 * p.alpha}, {mono(1, 1, 1), -2.0}},
  });
}

struct Trajectory {
  Vector times;
  Matrix states;  // N x d
  double dt = 0.0;

  Index size() const noexcept { return states.rows(); }
  int dimension() const noexcept { return static_cast<int>(states.cols()); }
};

inline bool state_diverged(const Vector& x) {
  for (Index i = 0; i < x.size(); ++i)
    if (!std::isfinite(x(i)) || std::abs(x(i)) > kDivergenceBound) return true;
  return false;
}

/// Classical RK4 with N states including x0. Throws NonFiniteState when the
/// divergence guard trips.
template <typename Rhs>
Trajectory integrate_rk4(Rhs&& rhs, const Vector& x0, double dt, Index n) {
  if (!(dt > 0.0) || n < 2) throw Error(ErrorCode::InvalidArgument, "integration needs dt > 0 and N >= 2");
  if (state_diverged(x0)) throw Error(ErrorCode::NonFiniteState, "initial state diverged");
  Trajectory tr;
  tr.dt = dt;
  tr.times.resize(n);
  tr.states.resize(n, x0.size());
  Vector x = x0;
  tr.times(0) = 0.0;
  tr.states.row(0) = x.transpose();
  for (Index i = 1; i < n; ++i) {
    const Vector k1 = rhs(x);
    const Vector k2 = rhs(Vector(x + 0.5 * dt * k1));
    const Vector k3 = rhs(Vector(x + 0.5 * dt * k2));
    const Vector k4 = rhs(Vector(x + dt * k3));
    x += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (state_diverged(x))
      throw Error(ErrorCode::NonFiniteState, "state diverged at step " + std::to_string(i));
    tr.times(i) = static_cast<double>(i) * dt;
    tr.states.row(i) = x.transpose();
  }
  return tr;
}

inline Index steps_for_horizon(double dt, double horizon) {
  return static_cast<Index>(std::llround(horizon / dt)) + 1;
}

/// Integrates a learnt system; nullopt marks an unsolvable model.
inline std::optional<Trajectory> integrate_learnt(const OdeSystem& system, const Vector& x0, double dt, double horizon) {
  if (!(horizon > 0.0)) throw Error(ErrorCode::InvalidArgument, "horizon must be positive");
  try {
    return integrate_rk4(system, x0, dt, steps_for_horizon(dt, horizon));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::NonFiniteState) return std::nullopt;
    throw;
  }
}

struct RegressionData {
  Matrix targets;   // (N-1) x d
  Matrix features;  // (N-1) x d
};

/// State paired with each forward difference (x_{i+1} - x_i) / dt.
enum class FdPairing {
  LeftEndpoint,  // x_i
  Midpoint,      // (x_i + x_{i+1}) / 2, removes the O(dt) term of the target bias
};

constexpr std::string_view to_string(FdPairing p) noexcept { return p == FdPairing::LeftEndpoint ? "left" : "midpoint"; }

inline FdPairing parse_pairing(std::string_view name) {
  if (name == "left") return FdPairing::LeftEndpoint;
  if (name == "midpoint") return FdPairing::Midpoint;
  throw Error(ErrorCode::InvalidArgument, "unknown pairing '" + std::string(name) + "'");
}

inline RegressionData finite_difference(const Trajectory& tr, FdPairing pairing = FdPairing::LeftEndpoint) {
  const Index n = tr.size();
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "finite differences need N >= 2");
  RegressionData out;
  const auto left = tr.states.topRows(n - 1);
  const auto right = tr.states.bottomRows(n - 1);
  out.targets = (right - left) / tr.dt;
  if (pairing == FdPairing::LeftEndpoint)
    out.features = left;
  else
    out.features = 0.5 * (left + right);
  return out;
}

/// Adds i.i.d. N(0, sigma²) to every state entry, row by row.
inline Trajectory add_noise(const Trajectory& tr, double sigma, std::uint64_t seed) {
  if (sigma < 0.0) throw Error(ErrorCode::InvalidArgument, "noise level must be >= 0");
  Trajectory out = tr;
  if (sigma == 0.0) return out;
  Rng rng(seed);
  std::normal_distribution<double> noise(0.0, sigma);
  for (Index i = 0; i < out.states.rows(); ++i)
    for (Index j = 0; j < out.states.cols(); ++j) out.states(i, j) += noise(rng);
  return out;
}

inline Table trajectory_table(const Trajectory& tr) {
  Table t;
  t.columns.push_back("t");
  for (int j = 1; j <= tr.dimension(); ++j) t.columns.push_back("x" + std::to_string(j));
  t.values.resize(tr.size(), tr.dimension() + 1);
  t.values.col(0) = tr.times;
  t.values.rightCols(tr.dimension()) = tr.states;
  return t;
}

enum class SystemId { Lorenz, RabinovichFabrikant };

constexpr std::string_view to_string(SystemId s) noexcept { return s == SystemId::Lorenz ? "lorenz" : "rf"; }

inline SystemId parse_system(std::string_view name) {
  if (name == "lorenz") return SystemId::Lorenz;
  if (name == "rf") return SystemId::RabinovichFabrikant;
  throw Error(ErrorCode::InvalidArgument, "unknown system '" + std::string(name) + "'");
}

inline OdeSystem true_system(SystemId s) { return s == SystemId::Lorenz ? lorenz_system() : rf_system(); }

inline Vector default_initial_condition(SystemId s) {
  Vector x0(3);
  if (s == SystemId::Lorenz)
    x0 << -8.0, 8.0, 27.0;
  else
    x0 << -1.5, 0.0, 1.0;
  return x0;
}

/// Shortest simulated time accepted per system; Lorenz requires T strictly
/// above its bound, RF allows equality.
inline double minimum_duration(SystemId s) { return s == SystemId::Lorenz ? 2.0 : 5.0; }

struct ScenarioConfig {
  SystemId system = SystemId::Lorenz;
  Index n = 5000;
  double dt = 0.002;
  double sigma = 0.0;
  std::uint64_t seed = 0;

  double duration() const noexcept { return static_cast<double>(n) * dt; }

  void validate() const {
    if (n < 2 || !(dt > 0.0) || !(sigma >= 0.0))
      throw Error(ErrorCode::InvalidArgument, "scenario needs N >= 2, dt > 0, sigma >= 0");
    const double t = duration();
    const double lo = minimum_duration(system);
    const bool ok = system == SystemId::Lorenz ? t > lo : t >= lo;
    if (!ok)
      throw Error(ErrorCode::InvalidArgument, "simulated time " + format_double(t) + " below the minimum for " +
                                                  std::string(to_string(system)));
  }
};

/// Clean trajectory from the default initial condition, then state noise.
inline Trajectory simulate(const ScenarioConfig& cfg) {
  cfg.validate();
  const Trajectory clean = integrate_rk4(true_system(cfg.system), default_initial_condition(cfg.system), cfg.dt, cfg.n);
  return add_noise(clean, cfg.sigma, derive_seed(cfg.seed, "noise"));
}

}  // namespace eqlearn
