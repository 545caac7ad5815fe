#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "samgs/numeric.hpp"

// Reference aggregators: linear sum (paired with Adam), PCGrad, and the
// two-task closed forms of MGDA and CAGrad.

namespace samgs {

struct AdamState {
  Vector first_moment;
  Vector second_moment;
  std::int64_t step = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double alpha = 1e-3;
};

AdamState make_adam(std::size_t dimension, double alpha, double beta1 = 0.9, double beta2 = 0.999,
                    double epsilon = 1e-8);

/// Standard bias-corrected Adam. Returns the delta to subtract from the
/// parameters; `state` is advanced only on success.
Vector adam_step(AdamState& state, const Vector& direction);

/// sum_k weight_k g_k
Vector ls_aggregate(const GradientSet& grads, std::span<const double> task_weights);

/// Projects each gradient (visited in `order`) off every other task gradient it
/// conflicts with, then sums. `order` lists the other tasks in the sequence
/// they are projected against.
Vector pcgrad_aggregate(const GradientSet& grads, std::span<const std::size_t> order);

/// Ascending task order.
Vector pcgrad_aggregate(const GradientSet& grads);

/// Min-norm element of the segment [g1, g2]. K must be 2.
Vector mgda_aggregate(const GradientSet& grads);

/// Mixing weight on g1 selected by mgda_aggregate.
double mgda_weight(const Vector& g1, const Vector& g2);

/// Two-task conflict-averse direction. The inner weight on g1 is picked by a
/// scan over [0, 1] in steps of 1e-4; the result is rescaled by 1 / (1 + c).
Vector cagrad_aggregate(const GradientSet& grads, double c);

}  // namespace samgs
