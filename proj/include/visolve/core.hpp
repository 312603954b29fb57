#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace visolve {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

inline bool all_finite(const Vec& v) { return v.allFinite(); }

inline void check_finite(const Vec& v, const char* what) {
  if (!v.allFinite()) throw std::invalid_argument(std::string(what) + ": non-finite entries");
}

inline void check_dim(const Vec& v, Eigen::Index dim, const char* what) {
  if (v.size() != dim)
    throw std::invalid_argument(std::string(what) + ": dimension mismatch (" +
                                std::to_string(v.size()) + " vs " + std::to_string(dim) + ")");
}

/// Counter-based splittable PRNG (splitmix64). Every sampling routine in the
/// library derives its stream from an explicit 64-bit seed so that results
/// are reproducible independent of call order or thread count.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1).
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform01(); }

  /// Standard normal via Box-Muller.
  double normal() {
    double u1 = uniform01(), u2 = uniform01();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
  }

  Vec uniform_vec(const Vec& lo, const Vec& hi) {
    Vec v(lo.size());
    for (Eigen::Index i = 0; i < lo.size(); ++i) v[i] = uniform(lo[i], hi[i]);
    return v;
  }

  Vec unit_direction(Eigen::Index n) {
    Vec d(n);
    double nrm = 0.0;
    do {
      for (Eigen::Index i = 0; i < n; ++i) d[i] = normal();
      nrm = d.norm();
    } while (nrm < 1e-300);
    return d / nrm;
  }

 private:
  std::uint64_t state_;
};

}  // namespace visolve
