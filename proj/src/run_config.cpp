#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "samgs/error.hpp"
#include "samgs/runner.hpp"

namespace samgs {

std::string_view to_string(Method method) noexcept {
  switch (method) {
    case Method::SamGs: return "samgs";
    case Method::LsAdam: return "ls_adam";
    case Method::PcGrad: return "pcgrad";
    case Method::Mgda: return "mgda";
    case Method::CaGrad: return "cagrad";
  }
  return "samgs";
}

Method parse_method(std::string_view text) {
  if (text == "samgs") return Method::SamGs;
  if (text == "ls_adam" || text == "ls") return Method::LsAdam;
  if (text == "pcgrad") return Method::PcGrad;
  if (text == "mgda") return Method::Mgda;
  if (text == "cagrad") return Method::CaGrad;
  throw Error(ErrorKind::Config, "unknown method '" + std::string(text) + "' (samgs|ls_adam|pcgrad|mgda|cagrad)");
}

std::string_view to_string(OuterOptimizer opt) noexcept {
  switch (opt) {
    case OuterOptimizer::Auto: return "auto";
    case OuterOptimizer::Plain: return "plain";
    case OuterOptimizer::Adam: return "adam";
  }
  return "auto";
}

OuterOptimizer parse_outer_optimizer(std::string_view text) {
  if (text == "auto") return OuterOptimizer::Auto;
  if (text == "plain" || text == "sgd") return OuterOptimizer::Plain;
  if (text == "adam") return OuterOptimizer::Adam;
  throw Error(ErrorKind::Config, "unknown outer optimizer '" + std::string(text) + "' (auto|plain|adam)");
}

void RunConfig::validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorKind::Config, msg); };
  if (max_steps < 1) fail("max_steps must be >= 1");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) fail("learning_rate must be positive");
  if (!(task_weight_alpha > 0.0) || !std::isfinite(task_weight_alpha)) fail("task_weight_alpha must be positive");
  if (!(cagrad_c >= 0.0)) fail("cagrad_c must be >= 0");
  if (!(tolerance.distance >= 0.0) || !(tolerance.loss >= 0.0)) fail("convergence tolerances must be >= 0");
  samgs_config().validate();
}

SamGsConfig RunConfig::samgs_config() const {
  SamGsConfig c;
  c.beta1 = beta1;
  c.beta2 = beta2;
  c.gamma = gamma;
  c.epsilon = epsilon;
  c.alpha = learning_rate;
  c.similarity_mode = similarity_mode;
  return c;
}

RunConfig parse_run_config(const std::string& json_text, RunConfig cfg) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Config, std::string("config: ") + e.what());
  }
  if (!doc.is_object()) throw Error(ErrorKind::Config, "config: top level must be an object");

  try {
    for (const auto& [key, value] : doc.items()) {
      if (key == "problem") cfg.problem = value.get<std::string>();
      else if (key == "method") cfg.method = parse_method(value.get<std::string>());
      else if (key == "max_steps") cfg.max_steps = value.get<std::int64_t>();
      else if (key == "learning_rate") cfg.learning_rate = value.get<double>();
      else if (key == "beta1") cfg.beta1 = value.get<double>();
      else if (key == "beta2") cfg.beta2 = value.get<double>();
      else if (key == "gamma") cfg.gamma = value.get<double>();
      else if (key == "epsilon") cfg.epsilon = value.get<double>();
      else if (key == "similarity_mode") cfg.similarity_mode = parse_similarity_aggregation(value.get<std::string>());
      else if (key == "task_weight_alpha") cfg.task_weight_alpha = value.get<double>();
      else if (key == "initial_points") cfg.initial_point_filter = value.get<std::vector<std::size_t>>();
      else if (key == "output_dir") cfg.output_dir = value.get<std::string>();
      else if (key == "seed") cfg.seed = value.get<std::uint64_t>();
      else if (key == "pcgrad_shuffle") cfg.pcgrad_shuffle = value.get<bool>();
      else if (key == "cagrad_c") cfg.cagrad_c = value.get<double>();
      else if (key == "outer_optimizer") cfg.outer_optimizer = parse_outer_optimizer(value.get<std::string>());
      else if (key == "early_stop") cfg.early_stop = value.get<bool>();
      else if (key == "tol_distance") cfg.tolerance.distance = value.get<double>();
      else if (key == "tol_loss") cfg.tolerance.loss = value.get<double>();
      else if (key == "parallel") cfg.parallel = value.get<bool>();
      else throw Error(ErrorKind::Config, "config: unknown key '" + key + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Config, std::string("config: ") + e.what());
  }
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Config, "cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str());
}

std::string dump_run_config(const RunConfig& cfg) {
  nlohmann::ordered_json doc;
  doc["problem"] = cfg.problem;
  doc["method"] = std::string(to_string(cfg.method));
  doc["max_steps"] = cfg.max_steps;
  doc["learning_rate"] = cfg.learning_rate;
  doc["beta1"] = cfg.beta1;
  doc["beta2"] = cfg.beta2;
  doc["gamma"] = cfg.gamma;
  doc["epsilon"] = cfg.epsilon;
  doc["similarity_mode"] = std::string(to_string(cfg.similarity_mode));
  doc["task_weight_alpha"] = cfg.task_weight_alpha;
  doc["initial_points"] = cfg.initial_point_filter;
  doc["output_dir"] = cfg.output_dir;
  doc["seed"] = cfg.seed;
  doc["pcgrad_shuffle"] = cfg.pcgrad_shuffle;
  doc["cagrad_c"] = cfg.cagrad_c;
  doc["outer_optimizer"] = std::string(to_string(cfg.outer_optimizer));
  doc["early_stop"] = cfg.early_stop;
  doc["tol_distance"] = cfg.tolerance.distance;
  doc["tol_loss"] = cfg.tolerance.loss;
  doc["parallel"] = cfg.parallel;
  return doc.dump(2);
}

}  // namespace samgs
