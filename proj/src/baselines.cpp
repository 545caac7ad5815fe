#include "samgs/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "samgs/error.hpp"

namespace samgs {

AdamState make_adam(std::size_t dimension, double alpha, double beta1, double beta2, double epsilon) {
  AdamState s;
  s.first_moment = Vector(dimension);
  s.second_moment = Vector(dimension);
  s.alpha = alpha;
  s.beta1 = beta1;
  s.beta2 = beta2;
  s.epsilon = epsilon;
  return s;
}

Vector adam_step(AdamState& state, const Vector& direction) {
  if (direction.size() != state.first_moment.size()) {
    throw Error(ErrorKind::DimensionMismatch, "adam_step: direction dimension does not match state");
  }
  if (!direction.all_finite()) throw Error(ErrorKind::NonFinite, "adam_step: non-finite direction");

  AdamState next = state;
  next.step += 1;
  const auto t = static_cast<double>(next.step);
  const double c1 = 1.0 - std::pow(next.beta1, t);
  const double c2 = 1.0 - std::pow(next.beta2, t);

  Vector delta(direction.size());
  for (std::size_t i = 0; i < direction.size(); ++i) {
    const double g = direction[i];
    next.first_moment[i] = next.beta1 * next.first_moment[i] + (1.0 - next.beta1) * g;
    next.second_moment[i] = next.beta2 * next.second_moment[i] + (1.0 - next.beta2) * g * g;
    const double m_hat = next.first_moment[i] / c1;
    const double v_hat = next.second_moment[i] / c2;
    delta[i] = next.alpha * m_hat / (std::sqrt(v_hat) + next.epsilon);
  }
  if (!delta.all_finite()) throw Error(ErrorKind::NonFinite, "adam_step: non-finite update");
  state = std::move(next);
  return delta;
}

Vector ls_aggregate(const GradientSet& grads, std::span<const double> task_weights) {
  if (task_weights.size() != grads.task_count()) {
    throw Error(ErrorKind::DimensionMismatch, "ls_aggregate: " + std::to_string(task_weights.size()) +
                                                  " weights for " + std::to_string(grads.task_count()) + " tasks");
  }
  Vector sum(grads.dimension());
  for (std::size_t k = 0; k < grads.task_count(); ++k) {
    if (!std::isfinite(task_weights[k])) throw Error(ErrorKind::NonFinite, "ls_aggregate: non-finite weight");
    sum = scale_add(sum, task_weights[k], grads[k]);
  }
  return sum;
}

Vector pcgrad_aggregate(const GradientSet& grads, std::span<const std::size_t> order) {
  const std::size_t k_tasks = grads.task_count();
  if (order.size() != k_tasks) throw Error(ErrorKind::InvalidArgument, "pcgrad_aggregate: order must list every task");
  std::vector<bool> seen(k_tasks, false);
  for (std::size_t idx : order) {
    if (idx >= k_tasks || seen[idx]) throw Error(ErrorKind::InvalidArgument, "pcgrad_aggregate: order is not a permutation");
    seen[idx] = true;
  }

  Vector sum(grads.dimension());
  for (std::size_t i = 0; i < k_tasks; ++i) {
    Vector g = grads[i];
    for (std::size_t j : order) {
      if (j == i) continue;
      const double d = dot(g, grads[j]);
      if (d < 0.0) {
        const double nj2 = dot(grads[j], grads[j]);
        if (nj2 > 0.0) g = scale_add(g, -d / nj2, grads[j]);
      }
    }
    sum = sum + g;
  }
  return sum;
}

Vector pcgrad_aggregate(const GradientSet& grads) {
  std::vector<std::size_t> order(grads.task_count());
  std::iota(order.begin(), order.end(), std::size_t{0});
  return pcgrad_aggregate(grads, order);
}

double mgda_weight(const Vector& g1, const Vector& g2) {
  const Vector diff = g1 - g2;
  const double denom = dot(diff, diff);
  if (denom == 0.0) return 1.0;
  return std::clamp(dot(g2 - g1, g2) / denom, 0.0, 1.0);
}

Vector mgda_aggregate(const GradientSet& grads) {
  if (grads.task_count() != 2) {
    throw Error(ErrorKind::InvalidArgument, "mgda_aggregate: closed form needs exactly 2 tasks");
  }
  const double lambda = mgda_weight(grads[0], grads[1]);
  return scale_add(lambda * grads[0], 1.0 - lambda, grads[1]);
}

Vector cagrad_aggregate(const GradientSet& grads, double c) {
  if (grads.task_count() != 2) {
    throw Error(ErrorKind::InvalidArgument, "cagrad_aggregate: grid solver needs exactly 2 tasks");
  }
  if (!(c >= 0.0) || !std::isfinite(c)) throw Error(ErrorKind::InvalidArgument, "cagrad_aggregate: c must be >= 0");

  const Vector& g1 = grads[0];
  const Vector& g2 = grads[1];
  const Vector mean = 0.5 * (g1 + g2);
  if (c == 0.0) return mean;

  // F(w) = g_w . g0 + c |g0| |g_w|, g_w = w g1 + (1 - w) g2, minimised over w in [0, 1].
  // Both terms are evaluated from inner products so the scan stays O(1) per node.
  const double radius = c * l2_norm(mean);
  const double p11 = dot(g1, g1);
  const double p12 = dot(g1, g2);
  const double p22 = dot(g2, g2);
  const double a1 = dot(g1, mean);
  const double a2 = dot(g2, mean);
  constexpr int kGrid = 10000;
  double best_w = 0.0;
  double best_f = 0.0;
  for (int i = 0; i <= kGrid; ++i) {
    const double w = static_cast<double>(i) / kGrid;
    const double v = 1.0 - w;
    const double sq = std::max(w * w * p11 + 2.0 * w * v * p12 + v * v * p22, 0.0);
    const double f = w * a1 + v * a2 + radius * std::sqrt(sq);
    if (i == 0 || f < best_f) {
      best_f = f;
      best_w = w;
    }
  }

  const Vector gw = scale_add(best_w * g1, 1.0 - best_w, g2);
  const double gw_norm = l2_norm(gw);
  Vector d = mean;
  if (gw_norm > 0.0) d = scale_add(mean, radius / gw_norm, gw);
  return (1.0 / (1.0 + c)) * d;
}

}  // namespace samgs
