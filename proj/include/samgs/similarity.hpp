#pragma once

#include <string_view>

#include "samgs/numeric.hpp"

namespace samgs {

/// How pairwise magnitude similarities are reduced to the scalar Psi.
enum class SimilarityAggregation {
  MeanAllPairs,    ///< mean over all K*K ordered pairs, diagonal included
  MinOffDiagonal,  ///< worst pair, i != j
};

std::string_view to_string(SimilarityAggregation mode) noexcept;
SimilarityAggregation parse_similarity_aggregation(std::string_view text);

/// Cosine of the angle between two gradients. Throws ZeroNorm if either is zero.
double cosine_similarity(const Vector& a, const Vector& b);

/// 2|a||b| / (|a|^2 + |b|^2). Throws ZeroNorm when both vectors vanish.
double magnitude_similarity(const Vector& a, const Vector& b);

/// Same as magnitude_similarity but on precomputed norms, with psi(0, 0) := 1.
double magnitude_similarity_from_norms(double norm_a, double norm_b) noexcept;

/// Psi over a gradient set. Two vanished gradients count as fully similar.
double aggregate_similarity(const GradientSet& grads, SimilarityAggregation mode);

/// Mean of psi over the i != j pairs only. Diagnostic companion to MeanAllPairs.
double mean_off_diagonal_similarity(const GradientSet& grads);

}  // namespace samgs
