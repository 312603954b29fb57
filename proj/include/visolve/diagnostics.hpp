#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "visolve/core.hpp"

namespace visolve {

/// One record per solver iteration. dist_ref is NaN when the run has no
/// reference solution. Counters are cumulative totals at the end of the
/// iteration.
struct TraceRow {
  long iter = 0;
  double lambda = 0.0;
  double rho = 0.0;
  double residual = 0.0;   // natural residual |x_n - P_C(x_n - lambda F(x_n))|
  double dist_ref = std::numeric_limits<double>::quiet_NaN();
  double step_norm = 0.0;  // |x_n - y_n|
  long f_evals = 0;
  long proj_calls = 0;
  long long elapsed_ns = 0;
};

using Trace = std::vector<TraceRow>;

struct RunReport {
  long iterations = 0;
  double final_residual = 0.0;
  double final_dist_ref = std::numeric_limits<double>::quiet_NaN();
  long total_f_evals = 0;
  long total_proj_calls = 0;
  long long wall_ns = 0;
  bool empty_trace = false;
};

/// Totals and last-row values of a trace; an empty trace yields an all-zero
/// report with the empty flag set.
inline RunReport summarize(const Trace& trace) {
  RunReport r;
  if (trace.empty()) {
    r.empty_trace = true;
    r.final_dist_ref = 0.0;
    return r;
  }
  const TraceRow& last = trace.back();
  r.iterations = static_cast<long>(trace.size());
  r.final_residual = last.residual;
  r.final_dist_ref = last.dist_ref;
  r.total_f_evals = last.f_evals;
  r.total_proj_calls = last.proj_calls;
  r.wall_ns = last.elapsed_ns;
  return r;
}

/// Per-iteration contraction factor for strongly pseudo-monotone problems:
///   delta = sqrt(1 - rho (1 - (lambda L)^2) (lambda gamma / (1 + lambda L + lambda gamma))^2),
/// guaranteed in (0,1) under the preconditions.
inline double linear_rate_delta(double lambda, double L, double gamma, double rho) {
  require(L > 0.0 && lambda > 0.0 && lambda * L < 1.0,
          "linear_rate_delta: need 0 < lambda < 1/L");
  require(gamma > 0.0, "linear_rate_delta: need gamma > 0");
  require(rho > 0.0 && rho <= 1.0, "linear_rate_delta: need rho in (0,1]");
  const double lg = lambda * gamma;
  const double lL = lambda * L;
  const double ratio = lg / (1.0 + lL + lg);
  const double d2 = 1.0 - rho * (1.0 - lL * lL) * ratio * ratio;
  return std::sqrt(d2);
}

struct RateReport {
  std::vector<double> delta_theoretical;  // per-iteration, empty when gamma unknown
  double delta_empirical = std::numeric_limits<double>::quiet_NaN();
  long fejer_violations = 0;
  long prop32_violations = 0;
};

/// Checks a finished trace against the solver's certificates:
///  - Fejer monotonicity of dist_ref,
///  - the per-iteration key inequality
///      dist_{n+1}^2 <= dist_n^2 - rho_n (1 - (lambda_n L)^2) step_n^2
///    (the relaxation term it omits is nonpositive for rho in [0,1]),
/// each with 1e-8 absolute slack, and fits the empirical geometric rate by
/// least squares on log dist_ref over the tail half. Reports violations, never
/// throws on them. L is a Lipschitz upper bound for the operator; gamma > 0
/// additionally fills the theoretical contraction factors.
inline RateReport certify_trace(const Trace& trace, double L, double gamma = 0.0) {
  require(!trace.empty(), "certify_trace: empty trace");
  require(L > 0.0, "certify_trace: need L > 0");
  constexpr double kSlack = 1e-8;
  RateReport rep;

  for (std::size_t n = 0; n + 1 < trace.size(); ++n) {
    const TraceRow& a = trace[n];
    const TraceRow& b = trace[n + 1];
    if (!std::isfinite(a.dist_ref) || !std::isfinite(b.dist_ref)) continue;
    if (b.dist_ref > a.dist_ref + kSlack) ++rep.fejer_violations;
    const double lL = a.lambda * L;
    const double rhs = a.dist_ref * a.dist_ref -
                       a.rho * (1.0 - lL * lL) * a.step_norm * a.step_norm;
    if (b.dist_ref * b.dist_ref > rhs + kSlack) ++rep.prop32_violations;
  }

  if (gamma > 0.0) {
    rep.delta_theoretical.reserve(trace.size());
    for (const TraceRow& row : trace)
      rep.delta_theoretical.push_back(linear_rate_delta(row.lambda, L, gamma, row.rho));
  }

  // tail-half least-squares fit of log dist_ref (excludes the transient)
  const std::size_t start = trace.size() / 2;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  long m = 0;
  for (std::size_t n = start; n < trace.size(); ++n) {
    const double d = trace[n].dist_ref;
    if (!std::isfinite(d) || d <= 1e-300) continue;
    const double xi = static_cast<double>(n);
    const double yi = std::log(d);
    sx += xi;
    sy += yi;
    sxx += xi * xi;
    sxy += xi * yi;
    ++m;
  }
  if (m >= 2) {
    const double denom = m * sxx - sx * sx;
    if (denom > 0.0) rep.delta_empirical = std::exp((m * sxy - sx * sy) / denom);
  }
  return rep;
}

}  // namespace visolve
