#pragma once

#include <chrono>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "visolve/core.hpp"
#include "visolve/diagnostics.hpp"
#include "visolve/geometry.hpp"
#include "visolve/operators.hpp"

namespace visolve {

enum class Method { Fbf, Extragradient, SubgradientExtragradient, ProjectedGradient };

enum class Status { Running, SolvedExact, TolReached, MaxIter, Diverged };

inline const char* to_string(Status s) {
  switch (s) {
    case Status::Running: return "running";
    case Status::SolvedExact: return "solved_exact";
    case Status::TolReached: return "tol_reached";
    case Status::MaxIter: return "max_iter";
    case Status::Diverged: return "diverged";
  }
  return "unknown";
}

inline const char* to_string(Method m) {
  switch (m) {
    case Method::Fbf: return "fbf";
    case Method::Extragradient: return "extragradient";
    case Method::SubgradientExtragradient: return "subgradient_extragradient";
    case Method::ProjectedGradient: return "projected_gradient";
  }
  return "unknown";
}

struct LambdaMode {
  bool adaptive = false;
  double lambda = 0.0;  // fixed stepsize, or lambda_0 when adaptive
  double mu = 0.0;      // adaptive shrink factor, in (0,1)

  static LambdaMode fixed(double lambda) { return {false, lambda, 0.0}; }
  static LambdaMode adapt(double lambda0, double mu) { return {true, lambda0, mu}; }
};

/// Relaxation schedule; a sequence shorter than the iteration count repeats
/// its last value.
struct RhoSchedule {
  std::vector<double> values{1.0};

  static RhoSchedule constant(double rho) { return {{rho}}; }
  static RhoSchedule sequence(std::vector<double> vals) { return {std::move(vals)}; }

  double at(long n) const {
    if (values.empty()) return 1.0;
    const std::size_t i = static_cast<std::size_t>(n);
    return i < values.size() ? values[i] : values.back();
  }
};

enum class StopKind { ResidualBelow, DistToRefBelow, ExactTermination };

struct StopRule {
  StopKind kind = StopKind::ExactTermination;
  double eps = 0.0;

  static StopRule residual_below(double eps) { return {StopKind::ResidualBelow, eps}; }
  static StopRule dist_to_ref_below(double eps) { return {StopKind::DistToRefBelow, eps}; }
  static StopRule exact_termination() { return {StopKind::ExactTermination, 0.0}; }
};

struct SolverConfig {
  Method method = Method::Fbf;
  LambdaMode lambda_mode = LambdaMode::fixed(0.1);
  RhoSchedule rho = RhoSchedule::constant(1.0);
  Vec x0;
  long max_iter = 1000;
  StopRule stop = StopRule::exact_termination();
  std::optional<Vec> x_ref;  // reference solution: dist-stop target and trace column
  std::uint64_t seed = 0;
  std::optional<double> lipschitz;  // known L-hat, enables stepsize validation
  bool allow_unsafe_lambda = false;
};

struct SolverState {
  long n = 0;
  Vec x, y, t;
  double lambda = 0.0;
  double rho = 1.0;
  long f_evals = 0;
  long proj_calls = 0;
  Status status = Status::Running;
  // stats of the most recent step, about the pre-update iterate
  double last_step_norm = 0.0;
  double last_residual = 0.0;
  double lambda_used = 0.0;
};

inline constexpr double kDivergenceNorm = 1e12;

/// Floating-point stand-in for the exact STOP test y_n == x_n / F(y_n) == 0.
inline double exact_stop_tol(const Vec& x) { return 1e-13 * (1.0 + x.norm()); }

/// Adaptive stepsize: lambda_{n+1} = min(mu |x-y| / |Fx-Fy|, lambda_n), kept
/// unchanged when Fx and Fy agree componentwise within 1e-15. Nonincreasing
/// and bounded below by min(lambda_0, mu/L).
inline double adaptive_lambda(double lambda_n, double mu, const Vec& x, const Vec& y,
                              const Vec& Fx, const Vec& Fy) {
  require(mu > 0.0 && mu < 1.0, "adaptive_lambda: mu must be in (0,1)");
  require(lambda_n > 0.0, "adaptive_lambda: lambda must be > 0");
  const Vec d = Fx - Fy;
  if (d.lpNorm<Eigen::Infinity>() <= 1e-15) return lambda_n;
  return std::min(mu * (x - y).norm() / d.norm(), lambda_n);
}

/// |x - P_C(x - lambda F(x))|; zero exactly at solutions of VI(F, C).
template <class Op>
double natural_residual(Op&& op, const FeasibleSet& set, const Vec& x, double lambda) {
  require(lambda > 0.0, "natural_residual: lambda must be > 0");
  return (x - project(set, x - lambda * op(x))).norm();
}

inline void validate_config(const SolverConfig& cfg, const FeasibleSet& set) {
  require(cfg.x0.size() == set.dim(), "config: x0 dimension mismatch");
  check_finite(cfg.x0, "config x0");
  require(cfg.max_iter >= 0, "config: max_iter must be >= 0");
  require(cfg.lambda_mode.lambda > 0.0, "config: lambda must be > 0");
  if (cfg.lambda_mode.adaptive) {
    require(cfg.lambda_mode.mu > 0.0 && cfg.lambda_mode.mu < 1.0,
            "config: adaptive mu must be in (0,1)");
    require(cfg.method != Method::ProjectedGradient,
            "config: adaptive stepsize needs the trial-point evaluation, "
            "not available in projected_gradient");
  }
  require(!cfg.rho.values.empty(), "config: empty rho schedule");
  for (double r : cfg.rho.values) {
    require(r >= 0.0 && r < 2.0, "config: rho must lie in [0,2)");
    if (r > 1.0) require(cfg.method == Method::Fbf, "config: rho > 1 is only valid for fbf");
  }
  if (cfg.stop.kind == StopKind::DistToRefBelow)
    require(cfg.x_ref.has_value(), "config: dist-to-ref stop needs a reference point");
  if (cfg.x_ref) {
    require(cfg.x_ref->size() == set.dim(), "config: x_ref dimension mismatch");
    check_finite(*cfg.x_ref, "config x_ref");
  }
  require(cfg.stop.eps >= 0.0, "config: stop tolerance must be >= 0");

  if (cfg.lipschitz && !cfg.lambda_mode.adaptive && !cfg.allow_unsafe_lambda) {
    const double lL = cfg.lambda_mode.lambda * *cfg.lipschitz;
    require(lL < 1.0, "config: lambda * L >= 1 (set allow_unsafe_lambda to override)");
    const double rho_cap = 2.0 - 2.0 * lL / (1.0 + lL);
    for (double r : cfg.rho.values)
      if (r > 1.0)
        require(r < rho_cap,
                "config: overrelaxation rho exceeds 2 - 2*lambda*L/(1 + lambda*L) "
                "(set allow_unsafe_lambda to override)");
  }
}

namespace detail {

inline bool diverged(const Vec& x) { return !x.allFinite() || x.norm() > kDivergenceNorm; }

}  // namespace detail

/// One iteration of the relaxed forward-backward-forward method:
///   y_n = P_C(x_n - lambda_n F(x_n)),
///   t_n = y_n + lambda_n (F(x_n) - F(y_n)),
///   x_{n+1} = rho_n t_n + (1 - rho_n) x_n.
/// Exactly two operator evaluations and one projection per full step. The
/// exact STOP test (y_n == x_n or F(y_n) == 0 up to exact_stop_tol) sets
/// status solved_exact.
template <class Op>
void fbf_step(SolverState& s, Op&& op, const FeasibleSet& set, const SolverConfig& cfg) {
  require(s.status == Status::Running, "fbf_step: solver not running");
  s.rho = cfg.rho.at(s.n);
  s.lambda_used = s.lambda;
  const Vec Fx = op(s.x);
  ++s.f_evals;
  s.y = project(set, s.x - s.lambda * Fx);
  ++s.proj_calls;
  s.last_step_norm = s.last_residual = (s.y - s.x).norm();
  const double tol = exact_stop_tol(s.x);
  if (s.last_step_norm <= tol) {
    s.status = Status::SolvedExact;
    return;
  }
  const Vec Fy = op(s.y);
  ++s.f_evals;
  if (Fy.norm() <= tol) {
    s.status = Status::SolvedExact;
    s.x = s.y;
    return;
  }
  s.t = s.y + s.lambda * (Fx - Fy);
  const double next_lambda =
      cfg.lambda_mode.adaptive
          ? adaptive_lambda(s.lambda, cfg.lambda_mode.mu, s.x, s.y, Fx, Fy)
          : s.lambda;
  s.x = s.rho * s.t + (1.0 - s.rho) * s.x;
  s.lambda = next_lambda;
  ++s.n;
  if (detail::diverged(s.x)) s.status = Status::Diverged;
}

/// Korpelevich extragradient: two evaluations and two projections per step.
template <class Op>
void extragradient_step(SolverState& s, Op&& op, const FeasibleSet& set,
                        const SolverConfig& cfg) {
  require(s.status == Status::Running, "extragradient_step: solver not running");
  s.rho = 1.0;
  s.lambda_used = s.lambda;
  const Vec Fx = op(s.x);
  ++s.f_evals;
  s.y = project(set, s.x - s.lambda * Fx);
  ++s.proj_calls;
  s.last_step_norm = s.last_residual = (s.y - s.x).norm();
  const double tol = exact_stop_tol(s.x);
  if (s.last_step_norm <= tol) {
    s.status = Status::SolvedExact;
    return;
  }
  const Vec Fy = op(s.y);
  ++s.f_evals;
  if (Fy.norm() <= tol) {
    s.status = Status::SolvedExact;
    s.x = s.y;
    return;
  }
  const double next_lambda =
      cfg.lambda_mode.adaptive
          ? adaptive_lambda(s.lambda, cfg.lambda_mode.mu, s.x, s.y, Fx, Fy)
          : s.lambda;
  s.x = project(set, s.x - s.lambda * Fy);
  ++s.proj_calls;
  s.lambda = next_lambda;
  ++s.n;
  if (detail::diverged(s.x)) s.status = Status::Diverged;
}

/// Subgradient-extragradient: the second projection is the closed-form one
/// onto the halfspace T_n = { w : <x_n - lambda F(x_n) - y_n, w - y_n> <= 0 }.
/// A degenerate normal (trial point already feasible) makes T_n the whole
/// space and the projection the identity.
template <class Op>
void subgradient_extragradient_step(SolverState& s, Op&& op, const FeasibleSet& set,
                                    const SolverConfig& cfg) {
  require(s.status == Status::Running, "subgradient_extragradient_step: solver not running");
  s.rho = 1.0;
  s.lambda_used = s.lambda;
  const Vec Fx = op(s.x);
  ++s.f_evals;
  const Vec trial = s.x - s.lambda * Fx;
  s.y = project(set, trial);
  ++s.proj_calls;
  s.last_step_norm = s.last_residual = (s.y - s.x).norm();
  const double tol = exact_stop_tol(s.x);
  if (s.last_step_norm <= tol) {
    s.status = Status::SolvedExact;
    return;
  }
  const Vec Fy = op(s.y);
  ++s.f_evals;
  if (Fy.norm() <= tol) {
    s.status = Status::SolvedExact;
    s.x = s.y;
    return;
  }
  const Vec a = trial - s.y;
  const double next_lambda =
      cfg.lambda_mode.adaptive
          ? adaptive_lambda(s.lambda, cfg.lambda_mode.mu, s.x, s.y, Fx, Fy)
          : s.lambda;
  s.x = project_halfspace(a, a.dot(s.y), s.x - s.lambda * Fy);
  ++s.proj_calls;
  s.lambda = next_lambda;
  ++s.n;
  if (detail::diverged(s.x)) s.status = Status::Diverged;
}

/// Plain projected gradient: x_{n+1} = P_C(x_n - lambda F(x_n)).
template <class Op>
void projected_gradient_step(SolverState& s, Op&& op, const FeasibleSet& set,
                             const SolverConfig& cfg) {
  (void)cfg;
  require(s.status == Status::Running, "projected_gradient_step: solver not running");
  s.rho = 1.0;
  s.lambda_used = s.lambda;
  const Vec Fx = op(s.x);
  ++s.f_evals;
  s.y = project(set, s.x - s.lambda * Fx);
  ++s.proj_calls;
  s.last_step_norm = s.last_residual = (s.y - s.x).norm();
  if (s.last_step_norm <= exact_stop_tol(s.x)) {
    s.status = Status::SolvedExact;
    return;
  }
  s.x = s.y;
  ++s.n;
  if (detail::diverged(s.x)) s.status = Status::Diverged;
}

template <class Op>
void step(SolverState& s, Op&& op, const FeasibleSet& set, const SolverConfig& cfg) {
  switch (cfg.method) {
    case Method::Fbf: fbf_step(s, op, set, cfg); break;
    case Method::Extragradient: extragradient_step(s, op, set, cfg); break;
    case Method::SubgradientExtragradient:
      subgradient_extragradient_step(s, op, set, cfg);
      break;
    case Method::ProjectedGradient: projected_gradient_step(s, op, set, cfg); break;
  }
}

struct SolveResult {
  Trace trace;
  Status status = Status::Running;
  Vec x_final;
  SolverState state;
};

/// Drives the configured method until a stop rule fires. Deterministic given
/// the config; one TraceRow per executed iteration; max_iter is a status,
/// not an error.
template <class Op>
SolveResult solve(const SolverConfig& cfg, Op&& op, const FeasibleSet& set) {
  validate_config(cfg, set);
  SolveResult out;
  SolverState& s = out.state;
  s.x = cfg.x0;
  s.lambda = cfg.lambda_mode.lambda;
  const auto t0 = std::chrono::steady_clock::now();
  const auto elapsed_ns = [&t0]() {
    return std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() -
                                                                t0)
        .count();
  };

  for (;;) {
    const double dist =
        cfg.x_ref ? (s.x - *cfg.x_ref).norm() : std::numeric_limits<double>::quiet_NaN();
    if (cfg.stop.kind == StopKind::DistToRefBelow && dist <= cfg.stop.eps) {
      s.status = Status::TolReached;
      break;
    }
    if (s.n >= cfg.max_iter) {
      s.status = Status::MaxIter;
      break;
    }
    const long iter = s.n;
    step(s, op, set, cfg);
    TraceRow row;
    row.iter = iter;
    row.lambda = s.lambda_used;
    row.rho = s.rho;
    row.residual = s.last_residual;
    row.dist_ref = dist;
    row.step_norm = s.last_step_norm;
    row.f_evals = s.f_evals;
    row.proj_calls = s.proj_calls;
    row.elapsed_ns = elapsed_ns();
    out.trace.push_back(row);
    if (s.status != Status::Running) break;
    if (cfg.stop.kind == StopKind::ResidualBelow && s.last_residual <= cfg.stop.eps) {
      s.status = Status::TolReached;
      break;
    }
  }
  out.status = s.status;
  out.x_final = s.x;
  return out;
}

inline SolveResult solve(const SolverConfig& cfg, const OperatorSpec& op, const FeasibleSet& set) {
  return solve(cfg, [&](const Vec& x) { return eval(op, x); }, set);
}

}  // namespace visolve
