#include "samgs/problems.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "samgs/error.hpp"

namespace samgs {

double ProblemSpec::combined_loss(const ParamVector& theta) const {
  const auto l = losses(theta);
  double sum = 0.0;
  for (std::size_t k = 0; k < l.size(); ++k) sum += task_weights[k] * l[k];
  return sum;
}

GradientSet ProblemSpec::weighted_gradients(const ParamVector& theta) const {
  const GradientSet raw = gradients(theta);
  std::vector<Vector> scaled;
  scaled.reserve(raw.task_count());
  for (std::size_t k = 0; k < raw.task_count(); ++k) {
    scaled.push_back(task_weights[k] == 1.0 ? raw[k] : task_weights[k] * raw[k]);
  }
  return GradientSet(std::move(scaled));
}

void ProblemSpec::validate() const {
  if (task_weights.size() != task_count) throw Error(ErrorKind::Config, name + ": task_weights length != task_count");
  for (double w : task_weights)
    if (!(w > 0.0) || !std::isfinite(w)) throw Error(ErrorKind::Config, name + ": task weights must be positive");
  if (initial_points.empty()) throw Error(ErrorKind::Config, name + ": no initial points");
  for (const auto& p : initial_points)
    if (p.size() != dimension) throw Error(ErrorKind::Config, name + ": initial point has wrong dimension");
  if (!losses || !gradients) throw Error(ErrorKind::Config, name + ": missing loss or gradient callable");
}

namespace two_optima {

namespace {

void require_point(const ParamVector& theta) {
  if (theta.size() != 2) throw Error(ErrorKind::DimensionMismatch, "two_optima: theta must be 2-dimensional");
  if (!theta.all_finite()) throw Error(ErrorKind::NonFinite, "two_optima: non-finite theta");
}

struct LogTerm {
  double value;
  std::array<double, 2> grad;
};

// log(max(|u|, floor)) + 6 where u = 0.5 (-theta_1 + shift) - tanh(-theta_2) + bias.
LogTerm log_term(const ParamVector& theta, double shift, double bias) {
  const double u = 0.5 * (-theta[0] + shift) - std::tanh(-theta[1]) + bias;
  const double au = std::abs(u);
  if (au > kLogFloor) {
    const double th = std::tanh(-theta[1]);
    const double du_dtheta2 = 1.0 - th * th;
    return {std::log(au) + kLogOffset, {-0.5 / u, du_dtheta2 / u}};
  }
  return {std::log(kLogFloor) + kLogOffset, {0.0, 0.0}};
}

LogTerm f1(const ParamVector& theta) { return log_term(theta, -7.0, 0.0); }
LogTerm f2(const ParamVector& theta) { return log_term(theta, 3.0, 2.0); }

std::array<double, 2> bowl_gradient(const ParamVector& theta, int sign) {
  std::array<double, 2> g{};
  for (std::size_t i = 0; i < 2; ++i) {
    const double a = (theta[i] - sign * kD1[i]) / 4.0;
    const double b = (theta[i] - sign * kD2[i]) / 4.0;
    // d/dtheta of 0.1 a^6 - b^4 - 1.5 b^2, with da/dtheta = db/dtheta = 1/4
    g[i] = 0.15 * std::pow(a, 5) - std::pow(b, 3) - 0.75 * b;
  }
  return g;
}

}  // namespace

std::array<double, 2> gates(const ParamVector& theta) {
  return {std::max(std::tanh(0.5 * theta[1]), 0.0), std::max(std::tanh(-0.5 * theta[1]), 0.0)};
}

double bowl(const ParamVector& theta, int sign) {
  double sixth = 0.0;
  double fourth = 0.0;
  double second = 0.0;
  for (std::size_t i = 0; i < 2; ++i) {
    const double a = (theta[i] - sign * kD1[i]) / 4.0;
    const double b = (theta[i] - sign * kD2[i]) / 4.0;
    sixth += std::pow(a, 6);
    fourth += std::pow(b, 4);
    second += b * b;
  }
  return 0.1 * sixth - fourth - 1.5 * second + 1.5;
}

Losses losses(const ParamVector& theta) {
  require_point(theta);
  const auto [c1, c2] = gates(theta);
  return {c1 * f1(theta).value + c2 * bowl(theta, +1), c1 * f2(theta).value + c2 * bowl(theta, -1)};
}

GradientSet gradients(const ParamVector& theta) {
  require_point(theta);
  const auto [c1, c2] = gates(theta);

  // Gate derivatives; zero wherever the max() clamps, including theta_2 == 0.
  const double t1 = std::tanh(0.5 * theta[1]);
  const double t2 = std::tanh(-0.5 * theta[1]);
  const double dc1 = t1 > 0.0 ? 0.5 * (1.0 - t1 * t1) : 0.0;
  const double dc2 = t2 > 0.0 ? -0.5 * (1.0 - t2 * t2) : 0.0;

  const LogTerm lf1 = f1(theta);
  const LogTerm lf2 = f2(theta);
  const double g1 = bowl(theta, +1);
  const double g2 = bowl(theta, -1);
  const auto dg1 = bowl_gradient(theta, +1);
  const auto dg2 = bowl_gradient(theta, -1);

  Vector grad1{c1 * lf1.grad[0] + c2 * dg1[0], dc1 * lf1.value + c1 * lf1.grad[1] + dc2 * g1 + c2 * dg1[1]};
  Vector grad2{c1 * lf2.grad[0] + c2 * dg2[0], dc1 * lf2.value + c1 * lf2.grad[1] + dc2 * g2 + c2 * dg2[1]};
  return GradientSet({std::move(grad1), std::move(grad2)});
}

}  // namespace two_optima

namespace {

// Located with tools/optima_oracle (grid over [-15, 15]^2 at 0.01, refined).
// Regenerate with: optima_oracle --problem two_optima
const std::vector<KnownOptimum>& two_optima_known_optima() {
  static const std::vector<KnownOptimum> optima = {
      {ParamVector{-5.4545705795288084, -10.84261383056641}, -74.133988152760395},
      {ParamVector{5.4545705795288084, -10.84261383056641}, -74.133988152760395},
  };
  return optima;
}

}  // namespace

ProblemSpec two_optima_problem() {
  ProblemSpec p;
  p.name = "two_optima";
  p.task_weights = {1.0, 1.0};
  p.initial_points = {{-3.5, 5.5}, {3.5, 5.5}, {-6.5, 2.5}, {6.5, 2.5}, {0.0, 10.0}, {0.0, -8.0}};
  p.known_optima = two_optima_known_optima();
  p.losses = [](const ParamVector& theta) {
    const auto l = two_optima::losses(theta);
    return std::vector<double>{l.task1, l.task2};
  };
  p.gradients = [](const ParamVector& theta) { return two_optima::gradients(theta); };
  return p;
}

ProblemSpec make_problem(std::string_view name, double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw Error(ErrorKind::Config, "task weight alpha must be positive, got " + std::to_string(alpha));
  }
  ProblemSpec p;
  if (name == "two_optima") {
    p = two_optima_problem();
  } else if (name == "one_optimum") {
    p = one_optimum_problem();
  } else {
    throw Error(ErrorKind::ProblemUnavailable, "unknown problem '" + std::string(name) + "'");
  }
  if (alpha != 1.0) {
    p.task_weights[0] = alpha;
    p.known_optima.clear();
  }
  return p;
}

std::vector<std::string> problem_names() { return {"two_optima", "one_optimum"}; }

std::function<double(const ParamVector&)> combined_loss_function(const ProblemSpec& problem) {
  return [problem](const ParamVector& theta) { return problem.combined_loss(theta); };
}

}  // namespace samgs
