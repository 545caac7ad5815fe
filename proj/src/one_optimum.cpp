// One-global-optimum toy problem.
//
// TRANSCRIBED FORMULAS. This is the two-parameter, two-task toy objective
// used by the conflict-averse gradient descent (CAGrad) reference
// implementation, copied term by term:
//
//   f1 = log(max(|0.5 (-x1 - 7) - tanh(-x2)|, 5e-6)) + 6
//   f2 = log(max(|0.5 (-x1 + 3) + tanh(-x2) + 2|, 5e-6)) + 6
//   q1 = ((-x1 + 7)^2 + 0.1 (-x2 - 8)^2) / 10 - 20
//   q2 = ((-x1 - 7)^2 + 0.1 (-x2 - 8)^2) / 10 - 20
//   c1 = max(tanh(0.5 x2), 0),  c2 = max(tanh(-0.5 x2), 0)
//   L1 = c1 f1 + c2 q1,  L2 = c1 f2 + c2 q2
//
// Building with -DSAMGS_WITH_ONE_OPTIMUM=OFF drops the transcription; the
// problem then reports ProblemUnavailable instead of silently running.

#include <algorithm>
#include <cmath>

#include "samgs/error.hpp"
#include "samgs/problems.hpp"

namespace samgs {

#ifdef SAMGS_WITH_ONE_OPTIMUM

namespace {

constexpr double kFloor = 5e-6;

struct Term {
  double value;
  double d1;
  double d2;
};

// log(max(|u|, floor)) + 6 with u = 0.5 (-x1 + shift) + sign * tanh(-x2) + bias
Term log_term(const ParamVector& x, double shift, double sign, double bias) {
  const double th = std::tanh(-x[1]);
  const double u = 0.5 * (-x[0] + shift) + sign * th + bias;
  if (std::abs(u) > kFloor) {
    const double du_dx2 = -sign * (1.0 - th * th);
    return {std::log(std::abs(u)) + 6.0, -0.5 / u, du_dx2 / u};
  }
  return {std::log(kFloor) + 6.0, 0.0, 0.0};
}

Term quadratic_term(const ParamVector& x, double centre) {
  const double a = -x[0] + centre;
  const double b = -x[1] - 8.0;
  return {(a * a + 0.1 * b * b) / 10.0 - 20.0, -2.0 * a / 10.0, -0.2 * b / 10.0};
}

void require_point(const ParamVector& x) {
  if (x.size() != 2) throw Error(ErrorKind::DimensionMismatch, "one_optimum: theta must be 2-dimensional");
  if (!x.all_finite()) throw Error(ErrorKind::NonFinite, "one_optimum: non-finite theta");
}

struct Evaluation {
  std::vector<double> losses;
  std::vector<Vector> grads;
};

Evaluation evaluate(const ParamVector& x) {
  require_point(x);
  const double t1 = std::tanh(0.5 * x[1]);
  const double t2 = std::tanh(-0.5 * x[1]);
  const double c1 = std::max(t1, 0.0);
  const double c2 = std::max(t2, 0.0);
  const double dc1 = t1 > 0.0 ? 0.5 * (1.0 - t1 * t1) : 0.0;
  const double dc2 = t2 > 0.0 ? -0.5 * (1.0 - t2 * t2) : 0.0;

  const Term f[2] = {log_term(x, -7.0, -1.0, 0.0), log_term(x, 3.0, +1.0, 2.0)};
  const Term q[2] = {quadratic_term(x, 7.0), quadratic_term(x, -7.0)};

  Evaluation e;
  for (int k = 0; k < 2; ++k) {
    e.losses.push_back(c1 * f[k].value + c2 * q[k].value);
    e.grads.push_back(Vector{c1 * f[k].d1 + c2 * q[k].d1,
                             dc1 * f[k].value + c1 * f[k].d2 + dc2 * q[k].value + c2 * q[k].d2});
  }
  return e;
}

// Located with tools/optima_oracle (grid over [-15, 15]^2 at 0.01, refined).
// Regenerate with: optima_oracle --problem one_optimum
const std::vector<KnownOptimum>& one_optimum_known_optima() {
  static const std::vector<KnownOptimum> optima = {
      {ParamVector{0.0, -8.3551098632812497}, -30.183276890613193},
  };
  return optima;
}

}  // namespace

bool one_optimum_available() noexcept { return true; }

ProblemSpec one_optimum_problem() {
  ProblemSpec p;
  p.name = "one_optimum";
  p.task_weights = {1.0, 1.0};
  p.initial_points = {{-8.0, 5.0}, {-3.0, 7.5}, {0.0, 10.0}, {3.0, 7.5}, {8.0, 5.0}, {-10.0, -2.5}, {10.0, -2.5}};
  p.known_optima = one_optimum_known_optima();
  p.losses = [](const ParamVector& x) { return evaluate(x).losses; };
  p.gradients = [](const ParamVector& x) { return GradientSet(evaluate(x).grads); };
  return p;
}

#else

bool one_optimum_available() noexcept { return false; }

ProblemSpec one_optimum_problem() {
  throw Error(ErrorKind::ProblemUnavailable,
              "one_optimum: formula transcription not compiled in (SAMGS_WITH_ONE_OPTIMUM=OFF)");
}

#endif

}  // namespace samgs
