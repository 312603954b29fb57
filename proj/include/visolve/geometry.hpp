#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <variant>

#include "visolve/core.hpp"

namespace visolve {

enum class LinearRelation { LessEqual, Equal };

/// Feasible sets with exact Euclidean projections: boxes, halfspaces,
/// hyperplanes, and a box intersected with one linear constraint
/// (capped box). The capped-box projection is computed by a scalar
/// multiplier search instead of a generic QP solve, so projections are
/// deterministic to machine precision.
class FeasibleSet {
 public:
  struct Box {
    Vec lo, hi;
  };
  struct Halfspace {  // { x : a.x <= b }
    Vec a;
    double b;
  };
  struct Hyperplane {  // { x : a.x == b }
    Vec a;
    double b;
  };
  struct BoxLinear {  // { x : lo <= x <= hi, a.x (<=|==) cap }
    Vec lo, hi, a;
    double cap;
    LinearRelation rel;
  };

  static FeasibleSet box(Vec lo, Vec hi) {
    validate_box(lo, hi);
    FeasibleSet s;
    s.dim_ = lo.size();
    s.v_ = Box{std::move(lo), std::move(hi)};
    return s;
  }

  static FeasibleSet halfspace(Vec a, double b) {
    check_finite(a, "halfspace normal");
    require(a.norm() > 0.0, "halfspace: zero normal");
    require(std::isfinite(b), "halfspace: non-finite offset");
    FeasibleSet s;
    s.dim_ = a.size();
    s.v_ = Halfspace{std::move(a), b};
    return s;
  }

  static FeasibleSet hyperplane(Vec a, double b) {
    check_finite(a, "hyperplane normal");
    require(a.norm() > 0.0, "hyperplane: zero normal");
    require(std::isfinite(b), "hyperplane: non-finite offset");
    FeasibleSet s;
    s.dim_ = a.size();
    s.v_ = Hyperplane{std::move(a), b};
    return s;
  }

  static FeasibleSet box_linear(Vec lo, Vec hi, Vec a, double cap, LinearRelation rel) {
    validate_box(lo, hi);
    check_finite(a, "box_linear normal");
    require(a.size() == lo.size(), "box_linear: normal dimension mismatch");
    require(a.norm() > 0.0, "box_linear: zero normal");
    require(std::isfinite(cap), "box_linear: non-finite cap");
    // nonemptiness: cap must be attainable over the box
    double amin = 0.0, amax = 0.0;
    for (Eigen::Index i = 0; i < a.size(); ++i) {
      amin += std::min(a[i] * lo[i], a[i] * hi[i]);
      amax += std::max(a[i] * lo[i], a[i] * hi[i]);
    }
    if (rel == LinearRelation::LessEqual)
      require(amin <= cap, "box_linear: empty set (cap below box minimum of a.x)");
    else
      require(amin <= cap && cap <= amax, "box_linear: empty set (cap not attainable)");
    FeasibleSet s;
    s.dim_ = lo.size();
    s.v_ = BoxLinear{std::move(lo), std::move(hi), std::move(a), cap, rel};
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
  static void validate_box(const Vec& lo, const Vec& hi) {
    check_finite(lo, "box lo");
    check_finite(hi, "box hi");
    require(lo.size() == hi.size(), "box: lo/hi dimension mismatch");
    for (Eigen::Index i = 0; i < lo.size(); ++i)
      require(lo[i] <= hi[i], "box: lo > hi at coordinate " + std::to_string(i));
  }

  Eigen::Index dim_ = 0;
  std::variant<Box, Halfspace, Hyperplane, BoxLinear> v_;
};

inline Vec clamp_box(const Vec& v, const Vec& lo, const Vec& hi) {
  return v.cwiseMax(lo).cwiseMin(hi);
}

/// Closed-form projection onto { x : a.x <= b }. A zero normal describes the
/// whole space (the degenerate halfspace arising in the subgradient-
/// extragradient method when the trial point is already feasible), so the
/// projection is the identity.
inline Vec project_halfspace(const Vec& a, double b, const Vec& v) {
  const double aa = a.squaredNorm();
  if (aa == 0.0) return v;
  const double viol = a.dot(v) - b;
  if (viol <= 0.0) return v;
  return v - (viol / aa) * a;
}

inline Vec project_hyperplane(const Vec& a, double b, const Vec& v) {
  const double aa = a.squaredNorm();
  return v - ((a.dot(v) - b) / aa) * a;
}

namespace detail {

// p(tau) = clamp(v - tau*a); phi(tau) = a.p(tau) - cap is nonincreasing and
// piecewise linear in tau. Bisect to |phi| <= 1e-12*max(1,|cap|).
inline Vec project_box_linear(const FeasibleSet::BoxLinear& s, const Vec& v) {
  const auto p_of = [&](double tau) { return clamp_box(v - tau * s.a, s.lo, s.hi); };
  const auto phi = [&](double tau) { return s.a.dot(p_of(tau)) - s.cap; };
  const double tol = 1e-12 * std::max(1.0, std::abs(s.cap));

  if (s.rel == LinearRelation::LessEqual && phi(0.0) <= tol) return p_of(0.0);

  double amin_abs = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < s.a.size(); ++i)
    if (s.a[i] != 0.0) amin_abs = std::min(amin_abs, std::abs(s.a[i]));
  double tau_hat =
      std::max(1.0, (v.norm() + s.lo.norm() + s.hi.norm() + std::abs(s.cap)) / amin_abs);

  double t_lo, t_hi;
  if (s.rel == LinearRelation::LessEqual) {
    t_lo = 0.0;
    t_hi = tau_hat;
  } else {
    t_lo = -tau_hat;
    t_hi = tau_hat;
  }
  int grow = 0;
  for (; grow < 200 && phi(t_hi) > 0.0; ++grow) t_hi *= 2.0;
  if (grow == 200) throw std::runtime_error("box_linear projection: failed to bracket (upper)");
  if (s.rel == LinearRelation::Equal) {
    grow = 0;
    for (; grow < 200 && phi(t_lo) < 0.0; ++grow) t_lo *= 2.0;
    if (grow == 200) throw std::runtime_error("box_linear projection: failed to bracket (lower)");
  }

  double mid = 0.5 * (t_lo + t_hi);
  for (int it = 0; it < 200; ++it) {
    mid = 0.5 * (t_lo + t_hi);
    const double f = phi(mid);
    if (std::abs(f) <= tol) break;
    if (f > 0.0)
      t_lo = mid;
    else
      t_hi = mid;
  }
  return p_of(mid);
}

}  // namespace detail

/// Euclidean projection of v onto the set.
inline Vec project(const FeasibleSet& set, const Vec& v) {
  check_dim(v, set.dim(), "project");
  check_finite(v, "project input");
  return set.visit([&](const auto& s) -> Vec {
    using T = std::decay_t<decltype(s)>;
    if constexpr (std::is_same_v<T, FeasibleSet::Box>)
      return clamp_box(v, s.lo, s.hi);
    else if constexpr (std::is_same_v<T, FeasibleSet::Halfspace>)
      return project_halfspace(s.a, s.b, v);
    else if constexpr (std::is_same_v<T, FeasibleSet::Hyperplane>)
      return project_hyperplane(s.a, s.b, v);
    else
      return detail::project_box_linear(s, v);
  });
}

/// True iff every defining constraint of the set holds within tol.
inline bool contains(const FeasibleSet& set, const Vec& v, double tol) {
  check_dim(v, set.dim(), "contains");
  require(tol >= 0.0, "contains: negative tolerance");
  return set.visit([&](const auto& s) -> bool {
    using T = std::decay_t<decltype(s)>;
    if constexpr (std::is_same_v<T, FeasibleSet::Box>) {
      return (v.array() >= s.lo.array() - tol).all() && (v.array() <= s.hi.array() + tol).all();
    } else if constexpr (std::is_same_v<T, FeasibleSet::Halfspace>) {
      return s.a.dot(v) <= s.b + tol;
    } else if constexpr (std::is_same_v<T, FeasibleSet::Hyperplane>) {
      return std::abs(s.a.dot(v) - s.b) <= tol;
    } else {
      if (!((v.array() >= s.lo.array() - tol).all() && (v.array() <= s.hi.array() + tol).all()))
        return false;
      const double ax = s.a.dot(v);
      return s.rel == LinearRelation::LessEqual ? ax <= s.cap + tol
                                                : std::abs(ax - s.cap) <= tol;
    }
  });
}

}  // namespace visolve
