#pragma once

#include <array>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "samgs/numeric.hpp"

// Synthetic two-parameter, two-task objectives.

namespace samgs {

struct KnownOptimum {
  ParamVector location;
  double combined_loss = 0.0;  ///< sum_k weight_k L_k at `location`
};

struct ProblemSpec {
  std::string name;
  std::size_t task_count = 2;
  std::size_t dimension = 2;
  std::vector<double> task_weights;  ///< (alpha, 1): L_mtl = alpha L1 + L2
  std::vector<ParamVector> initial_points;
  std::vector<KnownOptimum> known_optima;

  /// Unweighted per-task losses.
  std::function<std::vector<double>(const ParamVector&)> losses;
  /// Unweighted per-task analytic gradients.
  std::function<GradientSet(const ParamVector&)> gradients;

  double combined_loss(const ParamVector& theta) const;
  /// Per-task gradients scaled by the task weights.
  GradientSet weighted_gradients(const ParamVector& theta) const;

  void validate() const;
};

namespace two_optima {

inline constexpr std::array<double, 2> kD1{5.45, 0.0};
inline constexpr std::array<double, 2> kD2{5.5, 0.0};
inline constexpr double kLogFloor = 5e-6;
inline constexpr double kLogOffset = 6.0;

struct Losses {
  double task1 = 0.0;
  double task2 = 0.0;
};

Losses losses(const ParamVector& theta);
GradientSet gradients(const ParamVector& theta);

/// Tanh gates (c1, c2); at most one is positive.
std::array<double, 2> gates(const ParamVector& theta);

/// Polynomial bowl active for theta_2 < 0. sign = +1 gives g1 (centred on
/// +d), sign = -1 gives g2 (centred on -d).
double bowl(const ParamVector& theta, int sign);

}  // namespace two_optima

ProblemSpec two_optima_problem();

/// Throws ProblemUnavailable when built without the transcription.
ProblemSpec one_optimum_problem();
bool one_optimum_available() noexcept;

/// "two_optima" | "one_optimum", with task weights (alpha, 1). Known optima
/// are attached only for alpha = 1; other weightings must locate their own.
ProblemSpec make_problem(std::string_view name, double alpha = 1.0);

std::vector<std::string> problem_names();

/// Combined-loss closure for the given weights, suitable for the oracles.
std::function<double(const ParamVector&)> combined_loss_function(const ProblemSpec& problem);

}  // namespace samgs
