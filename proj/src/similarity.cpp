#include "samgs/similarity.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "samgs/error.hpp"

namespace samgs {

std::string_view to_string(SimilarityAggregation mode) noexcept {
  switch (mode) {
    case SimilarityAggregation::MeanAllPairs: return "mean";
    case SimilarityAggregation::MinOffDiagonal: return "min";
  }
  return "mean";
}

SimilarityAggregation parse_similarity_aggregation(std::string_view text) {
  if (text == "mean" || text == "mean_all_pairs") return SimilarityAggregation::MeanAllPairs;
  if (text == "min" || text == "min_off_diagonal") return SimilarityAggregation::MinOffDiagonal;
  throw Error(ErrorKind::Config, "unknown similarity mode '" + std::string(text) + "' (expected mean|min)");
}

double cosine_similarity(const Vector& a, const Vector& b) {
  const double na = l2_norm(a);
  const double nb = l2_norm(b);
  if (na == 0.0 || nb == 0.0) {
    throw Error(ErrorKind::ZeroNorm, "cosine_similarity: undefined for a zero-norm gradient");
  }
  const double c = dot(a, b) / (na * nb);
  return std::clamp(c, -1.0, 1.0);
}

double magnitude_similarity_from_norms(double norm_a, double norm_b) noexcept {
  const double denom = norm_a * norm_a + norm_b * norm_b;
  if (denom == 0.0) return 1.0;
  return 2.0 * norm_a * norm_b / denom;
}

double magnitude_similarity(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) {
    throw Error(ErrorKind::DimensionMismatch, "magnitude_similarity: dimension mismatch");
  }
  const double na = l2_norm(a);
  const double nb = l2_norm(b);
  if (na == 0.0 && nb == 0.0) {
    throw Error(ErrorKind::ZeroNorm, "magnitude_similarity: both gradients are zero (0/0)");
  }
  return magnitude_similarity_from_norms(na, nb);
}

double aggregate_similarity(const GradientSet& grads, SimilarityAggregation mode) {
  const auto norms = grads.norms();
  const std::size_t k = norms.size();
  switch (mode) {
    case SimilarityAggregation::MeanAllPairs: {
      double sum = 0.0;
      for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) sum += magnitude_similarity_from_norms(norms[i], norms[j]);
      return sum / static_cast<double>(k * k);
    }
    case SimilarityAggregation::MinOffDiagonal: {
      double lowest = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j)
          if (i != j) lowest = std::min(lowest, magnitude_similarity_from_norms(norms[i], norms[j]));
      return lowest;
    }
  }
  throw Error(ErrorKind::InvalidArgument, "aggregate_similarity: unknown mode");
}

double mean_off_diagonal_similarity(const GradientSet& grads) {
  const auto norms = grads.norms();
  const std::size_t k = norms.size();
  double sum = 0.0;
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j)
      if (i != j) sum += magnitude_similarity_from_norms(norms[i], norms[j]);
  return sum / static_cast<double>(k * (k - 1));
}

}  // namespace samgs
