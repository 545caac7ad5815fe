#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "samgs/numeric.hpp"

namespace samgs::prop {

// Seeded sampling helpers for the property tests. Each test owns its own Gen
// so reordering or filtering tests never changes another test's cases.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }

  /// Log-uniform magnitude, random sign.
  double scalar(double lo_exp = -3.0, double hi_exp = 3.0) {
    const double mag = std::pow(10.0, uniform(lo_exp, hi_exp));
    return coin() ? mag : -mag;
  }

  bool coin() { return std::bernoulli_distribution(0.5)(rng_); }

  std::size_t index(std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng_);
  }

  Vector vector(std::size_t dim, double lo = -10.0, double hi = 10.0) {
    std::vector<double> v(dim);
    for (double& x : v) x = uniform(lo, hi);
    return Vector(std::move(v));
  }

  /// Random nonzero vector with norm in [10^lo_exp, 10^hi_exp].
  Vector nonzero_vector(std::size_t dim, double lo_exp = -2.0, double hi_exp = 2.0) {
    Vector v(dim);
    double n = 0.0;
    do {
      v = vector(dim, -1.0, 1.0);
      n = l2_norm(v);
    } while (n < 1e-3);
    const double target = std::pow(10.0, uniform(lo_exp, hi_exp));
    return (target / n) * v;
  }

  GradientSet gradients(std::size_t k, std::size_t dim) {
    std::vector<Vector> g;
    for (std::size_t i = 0; i < k; ++i) g.push_back(nonzero_vector(dim));
    return GradientSet(std::move(g));
  }

  /// Random orthogonal transform in `dim` dimensions (Householder product).
  std::vector<Vector> rotation(std::size_t dim) {
    std::vector<Vector> q(dim, Vector(dim));
    for (std::size_t i = 0; i < dim; ++i) q[i][i] = 1.0;
    for (int r = 0; r < 3; ++r) {
      const Vector h = nonzero_vector(dim, 0.0, 0.0);
      const double hh = dot(h, h);
      for (auto& col : q) col = scale_add(col, -2.0 * dot(h, col) / hh, h);
    }
    return q;  // q[j] is the image of basis vector e_j
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

inline Vector apply(const std::vector<Vector>& q, const Vector& v) {
  Vector out(v.size());
  for (std::size_t j = 0; j < v.size(); ++j) out = scale_add(out, v[j], q[j]);
  return out;
}

inline double rel_diff(double a, double b) {
  const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
  return std::abs(a - b) / scale;
}

inline constexpr int kPropertyCases = 1000;

}  // namespace samgs::prop
