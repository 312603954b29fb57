#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "visolve/core.hpp"
#include "visolve/geometry.hpp"
#include "visolve/operators.hpp"

namespace visolve {

enum class Integrator { ExplicitEuler, Rk4 };

struct FlowConfig {
  double lambda = 0.1;
  Vec x0;
  double h = 1e-3;     // fixed step size
  double T = 10.0;     // horizon
  Integrator integrator = Integrator::Rk4;
  long sample_stride = 100;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<Vec> states;
  std::vector<double> lyapunov;  // |x(t) - x_ref|^2, only when x_ref supplied
  std::vector<double> gap;       // |x(t) - y(t)|
  bool diverged = false;
  double diverged_at = std::numeric_limits<double>::quiet_NaN();
};

/// Right-hand side of the continuous-time forward-backward-forward system:
///   xdot = -x + y + lambda (F(x) - F(y)),  y = P_C(x - lambda F(x)).
/// Vanishes exactly at solutions of VI(F, C).
template <class Op>
Vec vector_field(Op&& op, const FeasibleSet& set, double lambda, const Vec& x) {
  require(lambda > 0.0, "vector_field: lambda must be > 0");
  const Vec Fx = op(x);
  const Vec y = project(set, x - lambda * Fx);
  return -x + y + lambda * (Fx - op(y));
}

inline Vec vector_field(const OperatorSpec& op, const FeasibleSet& set, double lambda,
                        const Vec& x) {
  return vector_field([&](const Vec& v) { return eval(op, v); }, set, lambda, x);
}

/// One explicit Euler step x + h * xdot. With h = rho this is algebraically
/// identical to the relaxed forward-backward-forward update.
template <class Op>
Vec euler_step(Op&& op, const FeasibleSet& set, double lambda, const Vec& x, double h) {
  return x + h * vector_field(op, set, lambda, x);
}

/// Fixed-step integration of the flow; records every sample_stride-th state
/// plus the final one. Deterministic. Divergence (non-finite state) is
/// reported in the trajectory rather than thrown.
template <class Op>
Trajectory integrate(const FlowConfig& cfg, Op&& op, const FeasibleSet& set,
                     const std::optional<Vec>& x_ref = std::nullopt) {
  require(cfg.lambda > 0.0, "flow: lambda must be > 0");
  require(cfg.h > 0.0, "flow: step size must be > 0");
  require(cfg.T > 0.0 && cfg.h <= cfg.T, "flow: need 0 < h <= T");
  require(cfg.sample_stride >= 1, "flow: sample_stride must be >= 1");
  require(cfg.x0.size() == set.dim(), "flow: x0 dimension mismatch");
  if (x_ref) require(x_ref->size() == set.dim(), "flow: x_ref dimension mismatch");

  const auto field = [&](const Vec& x) { return vector_field(op, set, cfg.lambda, x); };

  Trajectory traj;
  const long steps = static_cast<long>(std::llround(cfg.T / cfg.h));
  Vec x = cfg.x0;

  const auto record = [&](double t, const Vec& xs) {
    traj.times.push_back(t);
    traj.states.push_back(xs);
    if (x_ref) traj.lyapunov.push_back((xs - *x_ref).squaredNorm());
    traj.gap.push_back((xs - project(set, xs - cfg.lambda * op(xs))).norm());
  };

  for (long k = 0; k < steps; ++k) {
    if (k % cfg.sample_stride == 0) record(k * cfg.h, x);
    if (cfg.integrator == Integrator::ExplicitEuler) {
      x = x + cfg.h * field(x);
    } else {
      const Vec k1 = field(x);
      const Vec k2 = field(x + 0.5 * cfg.h * k1);
      const Vec k3 = field(x + 0.5 * cfg.h * k2);
      const Vec k4 = field(x + cfg.h * k3);
      x = x + (cfg.h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    if (!x.allFinite()) {
      traj.diverged = true;
      traj.diverged_at = (k + 1) * cfg.h;
      return traj;
    }
  }
  record(steps * cfg.h, x);
  return traj;
}

inline Trajectory integrate(const FlowConfig& cfg, const OperatorSpec& op, const FeasibleSet& set,
                            const std::optional<Vec>& x_ref = std::nullopt) {
  return integrate(cfg, [&](const Vec& x) { return eval(op, x); }, set, x_ref);
}

/// Exponential decay rate of the Lyapunov function along the flow for
/// gamma-strongly pseudo-monotone operators:
///   alpha = 2 (1 - lambda L) (lambda gamma / (1 + lambda L + lambda gamma))^2.
inline double exp_rate_alpha(double lambda, double L, double gamma) {
  require(L > 0.0 && lambda > 0.0 && lambda * L < 1.0, "exp_rate_alpha: need 0 < lambda < 1/L");
  require(gamma > 0.0, "exp_rate_alpha: need gamma > 0");
  const double lg = lambda * gamma;
  const double ratio = lg / (1.0 + lambda * L + lg);
  return 2.0 * (1.0 - lambda * L) * ratio * ratio;
}

}  // namespace visolve
