#include "samgs/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "samgs/error.hpp"

namespace samgs {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::DimensionMismatch: return "dimension_mismatch";
    case ErrorKind::InvalidArgument: return "invalid_argument";
    case ErrorKind::ZeroNorm: return "zero_norm";
    case ErrorKind::NonFinite: return "non_finite";
    case ErrorKind::ProblemUnavailable: return "problem_unavailable";
    case ErrorKind::Config: return "config";
    case ErrorKind::Parse: return "parse";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

namespace {

void require_same_size(const Vector& a, const Vector& b, const char* op) {
  if (a.size() != b.size()) {
    throw Error(ErrorKind::DimensionMismatch,
                std::string(op) + ": dimension mismatch (" + std::to_string(a.size()) +
                    " vs " + std::to_string(b.size()) + ")");
  }
}

}  // namespace

bool Vector::all_finite() const noexcept {
  return std::all_of(values_.begin(), values_.end(), [](double x) { return std::isfinite(x); });
}

bool Vector::is_zero() const noexcept {
  return std::all_of(values_.begin(), values_.end(), [](double x) { return x == 0.0; });
}

double dot(const Vector& a, const Vector& b) {
  require_same_size(a, b, "dot");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
  return sum;
}

double l2_norm(const Vector& a) noexcept {
  double sum = 0.0;
  for (double x : a) sum += x * x;
  return std::sqrt(sum);
}

Vector scale_add(const Vector& accumulator, double coefficient, const Vector& v) {
  require_same_size(accumulator, v, "scale_add");
  Vector out = accumulator;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += coefficient * v[i];
  return out;
}

Vector operator+(const Vector& a, const Vector& b) { return scale_add(a, 1.0, b); }

Vector operator-(const Vector& a, const Vector& b) { return scale_add(a, -1.0, b); }

Vector operator*(double c, const Vector& a) {
  Vector out = a;
  for (double& x : out) x *= c;
  return out;
}

Vector hadamard(const Vector& a, const Vector& b) {
  require_same_size(a, b, "hadamard");
  Vector out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= b[i];
  return out;
}

double distance(const Vector& a, const Vector& b) { return l2_norm(a - b); }

GradientSet::GradientSet(std::vector<Vector> task_gradients) : gradients_(std::move(task_gradients)) {
  if (gradients_.size() < 2) {
    throw Error(ErrorKind::InvalidArgument,
                "GradientSet: need at least 2 task gradients, got " + std::to_string(gradients_.size()));
  }
  const std::size_t m = gradients_.front().size();
  if (m == 0) throw Error(ErrorKind::InvalidArgument, "GradientSet: zero-dimensional gradient");
  for (std::size_t k = 0; k < gradients_.size(); ++k) {
    if (gradients_[k].size() != m) {
      throw Error(ErrorKind::DimensionMismatch,
                  "GradientSet: gradient " + std::to_string(k) + " has dimension " +
                      std::to_string(gradients_[k].size()) + ", expected " + std::to_string(m));
    }
    if (!gradients_[k].all_finite()) {
      throw Error(ErrorKind::NonFinite, "GradientSet: gradient " + std::to_string(k) + " has non-finite entries");
    }
  }
}

std::vector<double> GradientSet::norms() const {
  std::vector<double> out;
  out.reserve(gradients_.size());
  for (const auto& g : gradients_) out.push_back(l2_norm(g));
  return out;
}

}  // namespace samgs
