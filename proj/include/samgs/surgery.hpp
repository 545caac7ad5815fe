#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "samgs/numeric.hpp"
#include "samgs/similarity.hpp"

// Similarity-aware momentum gradient surgery.
//
// One call to step() consumes the K task gradients of the current iterate and
// returns the combined descent direction. The caller owns the parameters and
// applies theta <- theta - learning_rate * direction (or hands the direction
// to another optimizer).

namespace samgs {

struct SamGsConfig {
  double beta1 = 0.9;    ///< momentum smoothing
  double beta2 = 0.99;   ///< similarity-momentum smoothing
  double gamma = 0.1;    ///< Psi threshold below which gradients are equalised
  double epsilon = 1e-8;
  double alpha = 1e-3;   ///< learning rate; step() does not use it
  SimilarityAggregation similarity_mode = SimilarityAggregation::MeanAllPairs;

  /// Throws Config unless 0 <= beta1, beta2 < 1, 0 <= gamma <= 1, epsilon > 0, alpha > 0.
  void validate() const;
};

struct SamGsState {
  std::vector<Vector> momenta;       ///< m_k, one per task
  double similarity_momentum = 0.0;  ///< h
  std::int64_t step = 0;             ///< t

  std::size_t task_count() const noexcept { return momenta.size(); }
  std::size_t dimension() const noexcept { return momenta.empty() ? 0 : momenta.front().size(); }

  friend bool operator==(const SamGsState&, const SamGsState&) = default;
};

enum class Branch { Equalisation, Momentum };

std::string_view to_string(Branch branch) noexcept;

struct StepOutcome {
  Vector update_direction;      ///< sum_k w_k (.) g_k
  Branch branch = Branch::Momentum;
  double psi = 0.0;             ///< aggregated similarity that drove the branch
  double psi_off_diagonal = 0.0;
  std::vector<Vector> weights;  ///< w_k, broadcast to full vectors in the equalisation branch
};

SamGsState init_state(std::size_t task_count, std::size_t dimension);

/// Scalar weights mean(|g|) / |g_k|. A vanished g_k gets weight 0.
/// Throws ZeroNorm when every gradient vanishes.
std::vector<double> equalisation_weights(const GradientSet& grads);

/// Advances `state` by one iteration and returns the combined direction.
/// Strong exception guarantee: on error `state` is left untouched.
StepOutcome step(SamGsState& state, const GradientSet& grads, const SamGsConfig& config);

/// Checkpoint format: JSON with the hyperparameters, t, h and the momenta as
/// flat arrays. Doubles are written in shortest round-trip form so a reloaded
/// state continues bit-identically.
std::string serialize_state(const SamGsState& state, const SamGsConfig& config);

struct SamGsCheckpoint {
  SamGsState state;
  SamGsConfig config;
};

SamGsCheckpoint deserialize_state(std::string_view text);

}  // namespace samgs
