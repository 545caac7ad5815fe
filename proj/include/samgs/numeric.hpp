#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace samgs {

/// Dense fixed-length vector of doubles. Dimension is set at construction.
class Vector {
 public:
  Vector() = default;
  explicit Vector(std::size_t dimension, double fill = 0.0) : values_(dimension, fill) {}
  Vector(std::initializer_list<double> values) : values_(values) {}
  explicit Vector(std::vector<double> values) : values_(std::move(values)) {}

  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }

  double& operator[](std::size_t i) noexcept { return values_[i]; }
  double operator[](std::size_t i) const noexcept { return values_[i]; }

  auto begin() noexcept { return values_.begin(); }
  auto end() noexcept { return values_.end(); }
  auto begin() const noexcept { return values_.begin(); }
  auto end() const noexcept { return values_.end(); }

  std::span<const double> view() const noexcept { return values_; }
  const std::vector<double>& values() const noexcept { return values_; }

  bool all_finite() const noexcept;
  bool is_zero() const noexcept;

  friend bool operator==(const Vector&, const Vector&) = default;

 private:
  std::vector<double> values_;
};

/// A point in parameter space.
using ParamVector = Vector;

double dot(const Vector& a, const Vector& b);
double l2_norm(const Vector& a) noexcept;

/// accumulator + coefficient * v
Vector scale_add(const Vector& accumulator, double coefficient, const Vector& v);

Vector operator+(const Vector& a, const Vector& b);
Vector operator-(const Vector& a, const Vector& b);
Vector operator*(double c, const Vector& a);

/// Elementwise (Hadamard) product.
Vector hadamard(const Vector& a, const Vector& b);

double distance(const Vector& a, const Vector& b);

/// K >= 2 per-task gradients over a shared parameter space.
class GradientSet {
 public:
  /// Validates K >= 2, a common dimension and finite entries.
  explicit GradientSet(std::vector<Vector> task_gradients);

  std::size_t task_count() const noexcept { return gradients_.size(); }
  std::size_t dimension() const noexcept { return gradients_.front().size(); }

  const Vector& operator[](std::size_t k) const noexcept { return gradients_[k]; }
  auto begin() const noexcept { return gradients_.begin(); }
  auto end() const noexcept { return gradients_.end(); }

  std::vector<double> norms() const;

 private:
  std::vector<Vector> gradients_;
};

}  // namespace samgs
