#include "samgs/runner.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <memory>
#include <numeric>
#include <random>

#include <json.hpp>

#include "samgs/baselines.hpp"
#include "samgs/error.hpp"
#include "samgs/optima_search.hpp"
#include "samgs/trajectory_io.hpp"

namespace samgs {

namespace {

constexpr double kStallNorm = 1e-12;
constexpr int kStallSteps = 100;

struct Direction {
  Vector value;
  std::optional<double> psi;
  std::optional<Branch> branch;
};

// Per-trajectory aggregation state for one method.
class Aggregator {
 public:
  Aggregator(const RunConfig& cfg, const ProblemSpec& problem, std::uint64_t stream)
      : cfg_(cfg), samgs_cfg_(cfg.samgs_config()) {
    const auto lo = [](std::uint64_t v) { return static_cast<std::uint32_t>(v); };
    const auto hi = [](std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); };
    std::seed_seq seq{lo(cfg.seed), hi(cfg.seed), lo(stream), hi(stream)};
    rng_.seed(seq);
    if (cfg.method == Method::SamGs) state_ = init_state(problem.task_count, problem.dimension);
    order_.resize(problem.task_count);
    std::iota(order_.begin(), order_.end(), std::size_t{0});
  }

  Direction next(const GradientSet& grads) {
    switch (cfg_.method) {
      case Method::SamGs: {
        const StepOutcome out = step(state_, grads, samgs_cfg_);
        return {out.update_direction, out.psi, out.branch};
      }
      case Method::LsAdam: {
        // Task weights are already folded into the gradients.
        const std::vector<double> ones(grads.task_count(), 1.0);
        return {ls_aggregate(grads, ones), std::nullopt, std::nullopt};
      }
      case Method::PcGrad:
        if (cfg_.pcgrad_shuffle) std::shuffle(order_.begin(), order_.end(), rng_);
        return {pcgrad_aggregate(grads, order_), std::nullopt, std::nullopt};
      case Method::Mgda:
        return {mgda_aggregate(grads), std::nullopt, std::nullopt};
      case Method::CaGrad:
        return {cagrad_aggregate(grads, cfg_.cagrad_c), std::nullopt, std::nullopt};
    }
    throw Error(ErrorKind::Config, "unsupported method");
  }

 private:
  const RunConfig& cfg_;
  SamGsConfig samgs_cfg_;
  SamGsState state_;
  std::vector<std::size_t> order_;
  std::mt19937_64 rng_;
};

bool uses_adam(const RunConfig& cfg) {
  if (cfg.outer_optimizer == OuterOptimizer::Auto) return cfg.method == Method::LsAdam;
  return cfg.outer_optimizer == OuterOptimizer::Adam;
}

bool all_finite(const std::vector<double>& xs) {
  return std::all_of(xs.begin(), xs.end(), [](double x) { return std::isfinite(x); });
}

TrajectoryRecord make_row(std::int64_t t, const ParamVector& theta, std::vector<double> losses,
                          const ProblemSpec& problem) {
  TrajectoryRecord row;
  row.t = t;
  row.theta = theta;
  row.combined_loss = 0.0;
  for (std::size_t k = 0; k < losses.size(); ++k) row.combined_loss += problem.task_weights[k] * losses[k];
  row.task_losses = std::move(losses);
  return row;
}

std::string labelled(const char* prefix, double v) { return std::string(prefix) + format_double(v); }

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write '" + path.string() + "'");
  out << text << '\n';
}

nlohmann::ordered_json verdict_json(const ConvergenceVerdict& v) {
  nlohmann::ordered_json j;
  j["reached"] = v.reached;
  j["which_optimum"] = v.which_optimum ? nlohmann::ordered_json(*v.which_optimum) : nlohmann::ordered_json(nullptr);
  j["nearest_optimum"] = v.nearest_optimum;
  j["final_distance"] = v.final_distance;
  j["final_combined_loss"] = v.final_combined_loss;
  j["steps_used"] = v.steps_used;
  j["diverged"] = v.diverged;
  return j;
}

nlohmann::ordered_json summary_json(const SummaryReport& r) {
  nlohmann::ordered_json j;
  j["config"] = nlohmann::ordered_json::parse(dump_run_config(r.config));
  auto optima = nlohmann::ordered_json::array();
  for (const auto& o : r.optima) optima.push_back({{"location", o.location.values()}, {"combined_loss", o.combined_loss}});
  j["known_optima"] = optima;
  auto points = nlohmann::ordered_json::array();
  for (const auto& p : r.points) {
    nlohmann::ordered_json pj;
    pj["index"] = p.index;
    pj["initial_point"] = p.initial.values();
    pj["verdict"] = verdict_json(p.verdict);
    pj["rows"] = p.rows;
    pj["equalisation_steps"] = p.equalisation_steps;
    pj["momentum_steps"] = p.momentum_steps;
    pj["trajectory_file"] = p.trajectory_file;
    points.push_back(pj);
  }
  j["points"] = points;
  j["success_count"] = r.success_count;
  j["point_count"] = r.points.size();
  j["diverged_count"] = r.diverged_count;
  j["mean_steps_to_converge"] =
      r.mean_steps_to_converge ? nlohmann::ordered_json(*r.mean_steps_to_converge) : nlohmann::ordered_json(nullptr);
  j["mean_final_loss"] = r.mean_final_loss;
  return j;
}

}  // namespace

ProblemSpec resolve_problem(const RunConfig& cfg) {
  ProblemSpec p = make_problem(cfg.problem, cfg.task_weight_alpha);
  if (p.known_optima.empty()) p.known_optima = locate_global_minima(combined_loss_function(p));
  p.validate();
  return p;
}

TrajectoryResult run_trajectory(const RunConfig& cfg, const ProblemSpec& problem, const ParamVector& theta_init) {
  cfg.validate();
  if (theta_init.size() != problem.dimension) {
    throw Error(ErrorKind::DimensionMismatch, "run_trajectory: initial point has wrong dimension");
  }

  // Stream id derived from the start point so parallel suites stay reproducible.
  std::uint64_t stream = 0;
  for (double x : theta_init) stream = stream * 1000003u + std::bit_cast<std::uint64_t>(x);

  Aggregator aggregator(cfg, problem, stream);
  std::optional<AdamState> adam;
  if (uses_adam(cfg)) adam = make_adam(problem.dimension, cfg.learning_rate);

  TrajectoryResult result;
  result.rows.reserve(static_cast<std::size_t>(cfg.max_steps) + 1);
  ParamVector theta = theta_init;
  result.rows.push_back(make_row(0, theta, problem.losses(theta), problem));

  bool diverged = !all_finite(result.rows.back().task_losses);
  int stalled = 0;
  for (std::int64_t t = 1; t <= cfg.max_steps && !diverged; ++t) {
    try {
      const GradientSet grads = problem.weighted_gradients(theta);
      const Direction d = aggregator.next(grads);
      const Vector delta = adam ? adam_step(*adam, d.value) : cfg.learning_rate * d.value;
      ParamVector next = theta - delta;
      if (!next.all_finite()) {
        diverged = true;
        break;
      }
      auto losses = problem.losses(next);
      if (!all_finite(losses)) {
        diverged = true;
        break;
      }
      theta = std::move(next);
      TrajectoryRecord row = make_row(t, theta, std::move(losses), problem);
      row.psi = d.psi;
      if (d.branch) row.branch = std::string(to_string(*d.branch));
      row.gradient_norms = grads.norms();
      result.rows.push_back(std::move(row));

      if (cfg.early_stop) {
        stalled = l2_norm(d.value) < kStallNorm ? stalled + 1 : 0;
        if (stalled >= kStallSteps) break;
      }
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NonFinite) throw;
      diverged = true;
    }
  }

  result.verdict = classify_convergence(result.rows, problem.known_optima, cfg.tolerance);
  if (diverged) {
    result.verdict.diverged = true;
    result.verdict.reached = false;
    result.verdict.which_optimum.reset();
  }
  return result;
}

TrajectoryResult run_trajectory(const RunConfig& cfg, const ParamVector& theta_init) {
  cfg.validate();
  return run_trajectory(cfg, resolve_problem(cfg), theta_init);
}

SummaryReport run_suite(const RunConfig& cfg) {
  cfg.validate();
  const ProblemSpec problem = resolve_problem(cfg);

  std::vector<std::size_t> indices = cfg.initial_point_filter;
  if (indices.empty()) {
    indices.resize(problem.initial_points.size());
    std::iota(indices.begin(), indices.end(), std::size_t{0});
  }
  for (std::size_t i : indices) {
    if (i >= problem.initial_points.size()) {
      throw Error(ErrorKind::Config, "initial point index " + std::to_string(i) + " out of range for " + problem.name);
    }
  }

  std::filesystem::path dir;
  if (!cfg.output_dir.empty()) {
    dir = cfg.output_dir;
    std::filesystem::create_directories(dir);
  }

  auto run_point = [&](std::size_t index) {
    TrajectoryResult traj = run_trajectory(cfg, problem, problem.initial_points[index]);
    PointSummary ps;
    ps.index = index;
    ps.initial = problem.initial_points[index];
    ps.verdict = traj.verdict;
    ps.rows = traj.rows.size();
    for (const auto& row : traj.rows) {
      if (!row.branch) continue;
      (*row.branch == to_string(Branch::Equalisation) ? ps.equalisation_steps : ps.momentum_steps) += 1;
    }
    if (!dir.empty()) {
      const auto file = dir / (problem.name + "_" + std::string(to_string(cfg.method)) + "_p" + std::to_string(index) + ".csv");
      write_trajectory_file(file.string(), traj.rows);
      ps.trajectory_file = file.string();
    }
    return ps;
  };

  SummaryReport report;
  report.config = cfg;
  report.optima = problem.known_optima;
  if (cfg.parallel && indices.size() > 1) {
    std::vector<std::future<PointSummary>> jobs;
    for (std::size_t i : indices) jobs.push_back(std::async(std::launch::async, run_point, i));
    for (auto& job : jobs) report.points.push_back(job.get());
  } else {
    for (std::size_t i : indices) report.points.push_back(run_point(i));
  }

  double steps_sum = 0.0;
  double loss_sum = 0.0;
  for (const auto& p : report.points) {
    if (p.verdict.reached) {
      ++report.success_count;
      steps_sum += static_cast<double>(p.verdict.steps_used);
    }
    if (p.verdict.diverged) ++report.diverged_count;
    loss_sum += p.verdict.final_combined_loss;
  }
  if (report.success_count > 0) report.mean_steps_to_converge = steps_sum / static_cast<double>(report.success_count);
  report.mean_final_loss = loss_sum / static_cast<double>(report.points.size());

  if (!dir.empty()) write_text(dir / "summary.json", summary_to_json(report));
  return report;
}

std::vector<double> default_gamma_values() { return {0.0, 0.1, 0.3, 0.5, 0.7, 0.9, 1.0}; }

AblationReport run_gamma_ablation(const RunConfig& base, const std::vector<double>& gammas) {
  if (gammas.empty()) throw Error(ErrorKind::Config, "ablate-gamma: empty gamma list");
  for (double g : gammas)
    if (!(g >= 0.0 && g <= 1.0)) throw Error(ErrorKind::Config, "ablate-gamma: gamma " + format_double(g) + " outside [0, 1]");

  AblationReport report;
  for (double g : gammas) {
    RunConfig cfg = base;
    cfg.method = Method::SamGs;
    cfg.gamma = g;
    if (!base.output_dir.empty()) cfg.output_dir = (std::filesystem::path(base.output_dir) / labelled("gamma_", g)).string();
    report.rows.push_back({g, run_suite(cfg)});
  }
  if (!base.output_dir.empty()) write_text(std::filesystem::path(base.output_dir) / "ablation.json", ablation_to_json(report));
  return report;
}

SweepReport run_weighting_sweep(const RunConfig& base, const std::vector<double>& alphas) {
  if (alphas.empty()) throw Error(ErrorKind::Config, "sweep-alpha: empty alpha list");
  for (double a : alphas)
    if (!(a > 0.0) || !std::isfinite(a)) throw Error(ErrorKind::Config, "sweep-alpha: alpha must be positive, got " + format_double(a));

  SweepReport report;
  for (double a : alphas) {
    RunConfig cfg = base;
    cfg.task_weight_alpha = a;
    if (cfg.problem == "two_optima") cfg.max_steps = std::max<std::int64_t>(cfg.max_steps, 30000);
    if (!base.output_dir.empty()) cfg.output_dir = (std::filesystem::path(base.output_dir) / labelled("alpha_", a)).string();
    report.rows.push_back({a, run_suite(cfg)});
  }
  if (!base.output_dir.empty()) write_text(std::filesystem::path(base.output_dir) / "sweep.json", sweep_to_json(report));
  return report;
}

std::string summary_to_json(const SummaryReport& report) { return summary_json(report).dump(2); }

std::string ablation_to_json(const AblationReport& report) {
  auto rows = nlohmann::ordered_json::array();
  for (const auto& r : report.rows) {
    std::int64_t eq = 0;
    std::int64_t mom = 0;
    for (const auto& p : r.summary.points) {
      eq += p.equalisation_steps;
      mom += p.momentum_steps;
    }
    nlohmann::ordered_json j;
    j["gamma"] = r.gamma;
    j["success_count"] = r.summary.success_count;
    j["point_count"] = r.summary.points.size();
    j["mean_final_loss"] = r.summary.mean_final_loss;
    j["mean_steps_to_converge"] = r.summary.mean_steps_to_converge ? nlohmann::ordered_json(*r.summary.mean_steps_to_converge)
                                                                   : nlohmann::ordered_json(nullptr);
    j["equalisation_steps"] = eq;
    j["momentum_steps"] = mom;
    rows.push_back(j);
  }
  nlohmann::ordered_json doc;
  doc["ablation"] = "gamma";
  doc["rows"] = rows;
  return doc.dump(2);
}

std::string sweep_to_json(const SweepReport& report) {
  auto rows = nlohmann::ordered_json::array();
  for (const auto& r : report.rows) {
    nlohmann::ordered_json j;
    j["alpha"] = r.alpha;
    j["max_steps"] = r.summary.config.max_steps;
    j["success_count"] = r.summary.success_count;
    j["point_count"] = r.summary.points.size();
    j["mean_final_loss"] = r.summary.mean_final_loss;
    j["mean_steps_to_converge"] = r.summary.mean_steps_to_converge ? nlohmann::ordered_json(*r.summary.mean_steps_to_converge)
                                                                   : nlohmann::ordered_json(nullptr);
    rows.push_back(j);
  }
  nlohmann::ordered_json doc;
  doc["sweep"] = "task_weight_alpha";
  doc["rows"] = rows;
  return doc.dump(2);
}

}  // namespace samgs
