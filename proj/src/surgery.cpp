#include "samgs/surgery.hpp"

#include <cmath>
#include <string>

#include <json.hpp>

#include "samgs/error.hpp"

namespace samgs {

namespace {

constexpr std::string_view kStateFormat = "samgs-state/1";

void require_finite(double value, const std::string& what) {
  if (!std::isfinite(value)) throw Error(ErrorKind::NonFinite, "samgs step: non-finite " + what);
}

void require_finite(const Vector& value, const std::string& what) {
  if (!value.all_finite()) throw Error(ErrorKind::NonFinite, "samgs step: non-finite " + what);
}

}  // namespace

void SamGsConfig::validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorKind::Config, "SamGsConfig: " + msg); };
  if (!(beta1 >= 0.0 && beta1 < 1.0)) fail("beta1 must lie in [0, 1)");
  if (!(beta2 >= 0.0 && beta2 < 1.0)) fail("beta2 must lie in [0, 1)");
  if (!(gamma >= 0.0 && gamma <= 1.0)) fail("gamma must lie in [0, 1]");
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) fail("epsilon must be positive");
  if (!(alpha > 0.0) || !std::isfinite(alpha)) fail("alpha must be positive");
}

std::string_view to_string(Branch branch) noexcept {
  return branch == Branch::Equalisation ? "equalisation" : "momentum";
}

SamGsState init_state(std::size_t task_count, std::size_t dimension) {
  if (task_count < 2) {
    throw Error(ErrorKind::InvalidArgument,
                "init_state: need at least 2 tasks, got " + std::to_string(task_count));
  }
  if (dimension < 1) throw Error(ErrorKind::InvalidArgument, "init_state: dimension must be >= 1");
  SamGsState state;
  state.momenta.assign(task_count, Vector(dimension));
  return state;
}

std::vector<double> equalisation_weights(const GradientSet& grads) {
  const auto norms = grads.norms();
  double total = 0.0;
  for (double n : norms) total += n;
  if (total == 0.0) throw Error(ErrorKind::ZeroNorm, "equalisation_weights: every gradient is zero");
  const double mean_norm = total / static_cast<double>(norms.size());

  std::vector<double> weights;
  weights.reserve(norms.size());
  for (double n : norms) weights.push_back(n == 0.0 ? 0.0 : mean_norm / n);
  return weights;
}

StepOutcome step(SamGsState& state, const GradientSet& grads, const SamGsConfig& config) {
  const std::size_t k_tasks = grads.task_count();
  const std::size_t dim = grads.dimension();
  if (state.task_count() != k_tasks) {
    throw Error(ErrorKind::DimensionMismatch, "samgs step: state tracks " + std::to_string(state.task_count()) +
                                                  " tasks, got " + std::to_string(k_tasks) + " gradients");
  }
  if (state.dimension() != dim) {
    throw Error(ErrorKind::DimensionMismatch, "samgs step: gradient dimension does not match state");
  }
  if (state.step < 0) throw Error(ErrorKind::InvalidArgument, "samgs step: negative step counter");

  SamGsState next = state;
  next.step += 1;
  const auto t = static_cast<double>(next.step);

  StepOutcome out;
  out.psi = aggregate_similarity(grads, config.similarity_mode);
  out.psi_off_diagonal = mean_off_diagonal_similarity(grads);

  for (std::size_t k = 0; k < k_tasks; ++k) {
    Vector& m = next.momenta[k];
    for (std::size_t i = 0; i < dim; ++i) m[i] = config.beta1 * m[i] + (1.0 - config.beta1) * grads[k][i];
    require_finite(m, "momentum m_" + std::to_string(k + 1));
  }

  const double dissimilarity = 1.0 - out.psi;
  next.similarity_momentum = config.beta2 * next.similarity_momentum +
                             (1.0 - config.beta2) * dissimilarity * dissimilarity + config.epsilon;
  require_finite(next.similarity_momentum, "similarity momentum h");

  const double m_correction = 1.0 - std::pow(config.beta1, t);
  const double h_hat = next.similarity_momentum / (1.0 - std::pow(config.beta2, t));
  require_finite(h_hat, "bias-corrected similarity momentum");

  out.weights.assign(k_tasks, Vector(dim));
  if (out.psi < config.gamma) {
    out.branch = Branch::Equalisation;
    const auto scalar = equalisation_weights(grads);
    for (std::size_t k = 0; k < k_tasks; ++k)
      for (std::size_t i = 0; i < dim; ++i) out.weights[k][i] = scalar[k];
  } else {
    out.branch = Branch::Momentum;
    const double denom = std::sqrt(h_hat) + config.epsilon;
    for (std::size_t k = 0; k < k_tasks; ++k) {
      for (std::size_t i = 0; i < dim; ++i) {
        const double m_hat = next.momenta[k][i] / m_correction;
        out.weights[k][i] = std::abs(m_hat) / denom;
      }
      require_finite(out.weights[k], "momentum weight w_" + std::to_string(k + 1));
    }
  }

  out.update_direction = Vector(dim);
  for (std::size_t k = 0; k < k_tasks; ++k)
    for (std::size_t i = 0; i < dim; ++i) out.update_direction[i] += out.weights[k][i] * grads[k][i];
  require_finite(out.update_direction, "update direction");

  state = std::move(next);
  return out;
}

std::string serialize_state(const SamGsState& state, const SamGsConfig& config) {
  nlohmann::ordered_json doc;
  doc["format"] = kStateFormat;
  doc["config"] = {
      {"beta1", config.beta1},
      {"beta2", config.beta2},
      {"gamma", config.gamma},
      {"epsilon", config.epsilon},
      {"alpha", config.alpha},
      {"similarity_mode", std::string(to_string(config.similarity_mode))},
  };
  doc["task_count"] = state.task_count();
  doc["dimension"] = state.dimension();
  doc["step"] = state.step;
  doc["similarity_momentum"] = state.similarity_momentum;
  auto flat = nlohmann::ordered_json::array();
  for (const auto& m : state.momenta)
    for (double x : m) flat.push_back(x);
  doc["momenta"] = std::move(flat);
  return doc.dump(2);
}

SamGsCheckpoint deserialize_state(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("samgs state: ") + e.what());
  }
  try {
    if (doc.at("format").get<std::string>() != kStateFormat) {
      throw Error(ErrorKind::Parse, "samgs state: unsupported format tag");
    }
    SamGsCheckpoint cp;
    const auto& c = doc.at("config");
    cp.config.beta1 = c.at("beta1").get<double>();
    cp.config.beta2 = c.at("beta2").get<double>();
    cp.config.gamma = c.at("gamma").get<double>();
    cp.config.epsilon = c.at("epsilon").get<double>();
    cp.config.alpha = c.at("alpha").get<double>();
    cp.config.similarity_mode = parse_similarity_aggregation(c.at("similarity_mode").get<std::string>());

    const auto k = doc.at("task_count").get<std::size_t>();
    const auto m = doc.at("dimension").get<std::size_t>();
    const auto flat = doc.at("momenta").get<std::vector<double>>();
    if (flat.size() != k * m) throw Error(ErrorKind::Parse, "samgs state: momenta length != task_count * dimension");

    cp.state = init_state(k, m);
    cp.state.step = doc.at("step").get<std::int64_t>();
    cp.state.similarity_momentum = doc.at("similarity_momentum").get<double>();
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < m; ++j) cp.state.momenta[i][j] = flat[i * m + j];
    return cp;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("samgs state: ") + e.what());
  }
}

}  // namespace samgs
