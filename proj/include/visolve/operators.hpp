#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <utility>
#include <variant>
#include <vector>

#include "visolve/core.hpp"

namespace visolve {

/// g(x) = exp(-|x|^2) + alpha, a strictly positive scaling used by the
/// pseudo-affine operators below. alpha is also a uniform lower bound of g,
/// which is what the strong pseudo-monotonicity modulus needs.
struct GShape {
  double alpha = 0.0;

  double operator()(const Vec& x) const { return std::exp(-x.squaredNorm()) + alpha; }
};

enum class ScalarShape { ExpBell, ExpBellPlusLinear };

/// Evaluatable operators with analytic metadata.
class OperatorSpec {
 public:
  /// F(x) = g(x) (M x + p); pseudo-monotone whenever sym(M) is PSD.
  struct PseudoAffine {
    Mat M;
    Vec p;
    GShape g;
  };
  /// Gradient of the quadratic-over-affine ratio
  ///   f(x) = (x'Mx + a'x + c) / (b'x + d),
  /// i.e. F(x) = [(b'x+d)(2Mx+a) - b(x'Mx+a'x+c)] / (b'x+d)^2.
  struct FractionalGradient {
    Mat M;
    Vec a, b;
    double c = 0.0, d = 0.0;
  };
  /// One-dimensional bell operators: x e^{-x^2} (+ slope * x).
  struct Scalar1D {
    ScalarShape shape = ScalarShape::ExpBell;
    double slope = 0.0;
  };

  static OperatorSpec pseudo_affine(Mat M, Vec p, double alpha) {
    require(M.allFinite(), "pseudo_affine: non-finite matrix");
    require(M.rows() == M.cols(), "pseudo_affine: matrix not square");
    require(p.size() == M.rows(), "pseudo_affine: offset dimension mismatch");
    require(alpha >= 0.0, "pseudo_affine: alpha must be >= 0");
    OperatorSpec s;
    s.dim_ = M.rows();
    s.v_ = PseudoAffine{std::move(M), std::move(p), GShape{alpha}};
    return s;
  }

  static OperatorSpec fractional_gradient(Mat M, Vec a, Vec b, double c, double d) {
    require(M.allFinite(), "fractional_gradient: non-finite matrix");
    require(M.rows() == M.cols(), "fractional_gradient: matrix not square");
    require(M.isApprox(M.transpose(), 1e-12), "fractional_gradient: matrix must be symmetric");
    require(a.size() == M.rows() && b.size() == M.rows(),
            "fractional_gradient: vector dimension mismatch");
    OperatorSpec s;
    s.dim_ = M.rows();
    s.v_ = FractionalGradient{std::move(M), std::move(a), std::move(b), c, d};
    return s;
  }

  static OperatorSpec scalar_exp_bell() {
    OperatorSpec s;
    s.dim_ = 1;
    s.v_ = Scalar1D{ScalarShape::ExpBell, 0.0};
    return s;
  }

  static OperatorSpec scalar_exp_bell_plus_linear(double slope) {
    OperatorSpec s;
    s.dim_ = 1;
    s.v_ = Scalar1D{ScalarShape::ExpBellPlusLinear, slope};
    return s;
  }

  Eigen::Index dim() const { return dim_; }

  template <class T>
  const T* as() const {
    return std::get_if<T>(&v_);
  }

  template <class Visitor>
  decltype(auto) visit(Visitor&& vis) const {
    return std::visit(std::forward<Visitor>(vis), v_);
  }

 private:
  Eigen::Index dim_ = 0;
  std::variant<PseudoAffine, FractionalGradient, Scalar1D> v_;
};

inline Vec eval(const OperatorSpec& op, const Vec& x) {
  check_dim(x, op.dim(), "eval");
  Vec out = op.visit([&](const auto& s) -> Vec {
    using T = std::decay_t<decltype(s)>;
    if constexpr (std::is_same_v<T, OperatorSpec::PseudoAffine>) {
      return s.g(x) * (s.M * x + s.p);
    } else if constexpr (std::is_same_v<T, OperatorSpec::FractionalGradient>) {
      const double den = s.b.dot(x) + s.d;
      if (!(den > 0.0))
        throw std::domain_error("fractional gradient: nonpositive denominator b'x + d");
      const double num = x.dot(s.M * x) + s.a.dot(x) + s.c;
      return ((den * (2.0 * (s.M * x) + s.a)) - num * s.b) / (den * den);
    } else {
      Vec r(1);
      const double t = x[0];
      r[0] = t * std::exp(-t * t);
      if (s.shape == ScalarShape::ExpBellPlusLinear) r[0] += s.slope * t;
      return r;
    }
  });
  if (!out.allFinite()) throw std::runtime_error("eval: non-finite operator value");
  return out;
}

/// Objective value of the fractional program the FractionalGradient variant
/// differentiates. Throws unless the operator is a FractionalGradient.
inline double fractional_value(const OperatorSpec& op, const Vec& x) {
  const auto* s = op.as<OperatorSpec::FractionalGradient>();
  require(s != nullptr, "fractional_value: operator is not a fractional gradient");
  check_dim(x, op.dim(), "fractional_value");
  const double den = s->b.dot(x) + s->d;
  if (!(den > 0.0))
    throw std::domain_error("fractional_value: nonpositive denominator b'x + d");
  return (x.dot(s->M * x) + s->a.dot(x) + s->c) / den;
}

/// Axis-aligned box over which analysis (Lipschitz estimation, class probes)
/// is performed.
struct Region {
  Vec lo, hi;

  static Region box(Vec lo, Vec hi) {
    check_finite(lo, "region lo");
    check_finite(hi, "region hi");
    require(lo.size() == hi.size(), "region: lo/hi dimension mismatch");
    for (Eigen::Index i = 0; i < lo.size(); ++i)
      require(lo[i] <= hi[i], "region: lo > hi");
    return Region{std::move(lo), std::move(hi)};
  }

  static Region cube(Eigen::Index n, double lo, double hi) {
    return box(Vec::Constant(n, lo), Vec::Constant(n, hi));
  }

  Eigen::Index dim() const { return lo.size(); }
  Vec center() const { return 0.5 * (lo + hi); }
  Vec halfwidth() const { return 0.5 * (hi - lo); }
};

struct OperatorAnalysis {
  double lipschitz_estimate = 0.0;  // sampled sup of the Jacobian spectral norm
  double strong_pm_modulus = 0.0;   // 0 = unknown / none
  long sample_count = 0;
  std::uint64_t seed = 0;
};

namespace detail {

template <class F>
Mat fd_jacobian(F&& f, const Vec& x, double step) {
  const Eigen::Index n = x.size();
  Vec f0 = f(x);
  const Eigen::Index m = f0.size();
  Mat J(m, n);
  Vec xp = x, xm = x;
  for (Eigen::Index j = 0; j < n; ++j) {
    xp[j] = x[j] + step;
    xm[j] = x[j] - step;
    J.col(j) = (f(xp) - f(xm)) / (2.0 * step);
    xp[j] = x[j];
    xm[j] = x[j];
  }
  if (!J.allFinite()) throw std::runtime_error("fd_jacobian: non-finite entries");
  return J;
}

// Spectral norm by power iteration on J'J, 50 steps, seeded start vector.
inline double spectral_norm(const Mat& J, SplitMix64& rng) {
  const Eigen::Index n = J.cols();
  if (n == 1) return J.col(0).norm();
  Vec v = rng.unit_direction(n);
  for (int it = 0; it < 50; ++it) {
    Vec w = J.transpose() * (J * v);
    const double nw = w.norm();
    if (nw < 1e-300) return 0.0;
    v = w / nw;
  }
  return (J * v).norm();
}

}  // namespace detail

/// Estimate of the Lipschitz constant over the region: the maximum sampled
/// spectral norm of the finite-difference Jacobian (central differences,
/// step 1e-6; power iteration, 50 steps). Sampling mixes uniform draws with
/// radially stratified draws around the region center, then refines the best
/// candidates by a bounded pattern search so interior peaks are not missed.
/// Deterministic given the seed. Still a sampled under-estimate of the true
/// supremum; callers that need a safe bound scale it up.
template <class F>
double estimate_lipschitz(F&& f, const Region& region, long samples, std::uint64_t seed) {
  require(samples >= 1, "estimate_lipschitz: samples must be >= 1");
  const Eigen::Index n = region.dim();
  const Vec c = region.center();
  const Vec w = region.halfwidth();
  SplitMix64 rng(seed);

  const auto signorm = [&](const Vec& x) {
    return detail::spectral_norm(detail::fd_jacobian(f, x, 1e-6), rng);
  };

  struct Cand {
    double val;
    Vec x;
  };
  std::vector<Cand> top;  // best candidates, kept small
  const auto offer = [&](double val, const Vec& x) {
    constexpr std::size_t kKeep = 8;
    if (top.size() < kKeep) {
      top.push_back({val, x});
    } else {
      auto worst = std::min_element(top.begin(), top.end(),
                                    [](const Cand& a, const Cand& b) { return a.val < b.val; });
      if (val > worst->val) *worst = {val, x};
    }
  };

  double best = signorm(c);
  offer(best, c);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (double sgn : {1.0, -1.0}) {
      Vec x = c;
      x[j] += sgn * w[j];
      const double s = signorm(x);
      offer(s, x);
      best = std::max(best, s);
    }
  }
  for (long k = 0; k < samples; ++k) {
    Vec x;
    if (k % 2 == 0) {
      x = rng.uniform_vec(region.lo, region.hi);
    } else {
      const double u = (static_cast<double>(k) + 0.5) / static_cast<double>(samples);
      x = c + u * w.cwiseProduct(rng.unit_direction(n));
    }
    const double s = signorm(x);
    offer(s, x);
    best = std::max(best, s);
  }

  // local refinement from the best explored points
  for (const auto& cand : top) {
    Vec x = cand.x;
    double cur = cand.val;
    double step = 0.25 * w.maxCoeff();
    while (step > 1e-5) {
      bool improved = false;
      for (Eigen::Index j = 0; j < n; ++j) {
        for (double sgn : {1.0, -1.0}) {
          Vec xt = x;
          xt[j] = std::clamp(xt[j] + sgn * step, region.lo[j], region.hi[j]);
          const double st = signorm(xt);
          if (st > cur + 1e-13) {
            cur = st;
            x = xt;
            improved = true;
          }
        }
      }
      if (!improved) step *= 0.5;
    }
    best = std::max(best, cur);
  }
  return best;
}

inline double estimate_lipschitz(const OperatorSpec& op, const Region& region, long samples,
                                 std::uint64_t seed) {
  require(region.dim() == op.dim(), "estimate_lipschitz: region dimension mismatch");
  return estimate_lipschitz([&](const Vec& x) { return eval(op, x); }, region, samples, seed);
}

/// q_lower * lambda_min(sym(M)) for q_lower a positive lower bound of the
/// scaling g on the region of interest; 0 when the symmetric part is not
/// positive definite.
inline double strong_pm_modulus(const Mat& M, double q_lower) {
  require(M.allFinite(), "strong_pm_modulus: non-finite matrix");
  require(M.rows() == M.cols(), "strong_pm_modulus: matrix not square");
  require(q_lower > 0.0, "strong_pm_modulus: q_lower must be > 0");
  Mat S = 0.5 * (M + M.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> es(S, Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues().minCoeff();
  return lmin > 0.0 ? q_lower * lmin : 0.0;
}

enum class MonotonicityClass { Monotone, PseudoMonotone, StronglyPseudoMonotone };

struct ProbeViolation {
  Vec x, y;
  double lhs;  // value of the failed inequality's left-hand side
};

struct ProbeReport {
  std::vector<ProbeViolation> violations;  // first <= 10
  bool passed = true;
  long pairs = 0;
  std::uint64_t seed = 0;
};

/// Samples point pairs uniformly in the region and checks the defining
/// implication/inequality of the monotonicity class with slack 1e-10.
/// A pass is sampling evidence, not a proof.
template <class F>
ProbeReport probe_class(F&& f, const Region& region, MonotonicityClass cls, double gamma,
                        long pairs, std::uint64_t seed) {
  require(pairs >= 1, "probe_class: pairs must be >= 1");
  if (cls == MonotonicityClass::StronglyPseudoMonotone)
    require(gamma > 0.0, "probe_class: strongly pseudo-monotone check needs gamma > 0");
  constexpr double kSlack = 1e-10;
  SplitMix64 rng(seed);
  ProbeReport rep;
  rep.pairs = pairs;
  rep.seed = seed;
  for (long k = 0; k < pairs; ++k) {
    Vec x = rng.uniform_vec(region.lo, region.hi);
    Vec y = rng.uniform_vec(region.lo, region.hi);
    const Vec d = y - x;
    bool ok = true;
    double lhs = 0.0;
    if (cls == MonotonicityClass::Monotone) {
      lhs = (f(y) - f(x)).dot(d);
      ok = lhs >= -kSlack;
    } else {
      if (f(x).dot(d) >= 0.0) {
        lhs = f(y).dot(d);
        const double need = cls == MonotonicityClass::PseudoMonotone
                                ? 0.0
                                : gamma * d.squaredNorm();
        ok = lhs >= need - kSlack;
      }
    }
    if (!ok) {
      rep.passed = false;
      if (rep.violations.size() < 10) rep.violations.push_back({x, y, lhs});
    }
  }
  return rep;
}

template <class... Args>
ProbeReport probe_class(const OperatorSpec& op, const Region& region, MonotonicityClass cls,
                        double gamma, long pairs, std::uint64_t seed) {
  require(region.dim() == op.dim(), "probe_class: region dimension mismatch");
  return probe_class([&](const Vec& x) { return eval(op, x); }, region, cls, gamma, pairs, seed);
}

}  // namespace visolve
