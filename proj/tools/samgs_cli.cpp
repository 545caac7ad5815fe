// Command-line driver for the gradient-surgery toy benchmarks.
//
// Exit codes: 0 success, 1 configuration/usage error, 2 every trajectory diverged.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "samgs/error.hpp"
#include "samgs/fd_oracle.hpp"
#include "samgs/metrics.hpp"
#include "samgs/optima_search.hpp"
#include "samgs/problems.hpp"
#include "samgs/runner.hpp"
#include "samgs/trajectory_io.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitDiverged = 2;

// Flags that mirror RunConfig. Anything left unset keeps the config-file (or
// built-in) value.
struct RunFlags {
  std::string config_path;
  std::optional<std::string> problem, method, similarity_mode, output_dir, outer_optimizer;
  std::optional<std::int64_t> max_steps;
  std::optional<double> learning_rate, beta1, beta2, gamma, epsilon, alpha, cagrad_c, tol_distance, tol_loss;
  std::optional<std::uint64_t> seed;
  std::vector<std::size_t> points;
  bool pcgrad_shuffle = false;
  bool early_stop = false;
  bool sequential = false;

  void attach(CLI::App* app) {
    app->add_option("--config", config_path, "JSON run configuration");
    app->add_option("--problem", problem, "two_optima | one_optimum");
    app->add_option("--method", method, "samgs | ls_adam | pcgrad | mgda | cagrad");
    app->add_option("--max-steps", max_steps);
    app->add_option("--lr,--learning-rate", learning_rate);
    app->add_option("--beta1", beta1);
    app->add_option("--beta2", beta2);
    app->add_option("--gamma", gamma);
    app->add_option("--epsilon", epsilon);
    app->add_option("--similarity", similarity_mode, "mean | min");
    app->add_option("--alpha", alpha, "task weight: L_mtl = alpha L1 + L2");
    app->add_option("--points", points, "initial point indices")->delimiter(',');
    app->add_option("--output-dir", output_dir);
    app->add_option("--seed", seed);
    app->add_flag("--pcgrad-shuffle", pcgrad_shuffle);
    app->add_option("--cagrad-c", cagrad_c);
    app->add_option("--outer-optimizer", outer_optimizer, "auto | plain | adam");
    app->add_flag("--early-stop", early_stop);
    app->add_option("--tol-distance", tol_distance);
    app->add_option("--tol-loss", tol_loss);
    app->add_flag("--sequential", sequential, "run initial points one after another");
  }

  samgs::RunConfig resolve() const {
    samgs::RunConfig cfg = config_path.empty() ? samgs::RunConfig{} : samgs::load_run_config(config_path);
    if (problem) cfg.problem = *problem;
    if (method) cfg.method = samgs::parse_method(*method);
    if (max_steps) cfg.max_steps = *max_steps;
    if (learning_rate) cfg.learning_rate = *learning_rate;
    if (beta1) cfg.beta1 = *beta1;
    if (beta2) cfg.beta2 = *beta2;
    if (gamma) cfg.gamma = *gamma;
    if (epsilon) cfg.epsilon = *epsilon;
    if (similarity_mode) cfg.similarity_mode = samgs::parse_similarity_aggregation(*similarity_mode);
    if (alpha) cfg.task_weight_alpha = *alpha;
    if (!points.empty()) cfg.initial_point_filter = points;
    if (output_dir) cfg.output_dir = *output_dir;
    if (seed) cfg.seed = *seed;
    if (pcgrad_shuffle) cfg.pcgrad_shuffle = true;
    if (cagrad_c) cfg.cagrad_c = *cagrad_c;
    if (outer_optimizer) cfg.outer_optimizer = samgs::parse_outer_optimizer(*outer_optimizer);
    if (early_stop) cfg.early_stop = true;
    if (tol_distance) cfg.tolerance.distance = *tol_distance;
    if (tol_loss) cfg.tolerance.loss = *tol_loss;
    if (sequential) cfg.parallel = false;
    cfg.validate();
    return cfg;
  }
};

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw samgs::Error(samgs::ErrorKind::Config, "bad number '" + item + "' in list '" + text + "'");
    }
  }
  return out;
}

int suite_exit_code(const samgs::SummaryReport& r) {
  return !r.points.empty() && r.diverged_count == r.points.size() ? kExitDiverged : kExitOk;
}

void print_summary_line(const samgs::SummaryReport& r) {
  std::fprintf(stderr, "%s/%s: %zu of %zu initial points converged", r.config.problem.c_str(),
               std::string(samgs::to_string(r.config.method)).c_str(), r.success_count, r.points.size());
  if (r.diverged_count) std::fprintf(stderr, " (%zu diverged)", r.diverged_count);
  std::fprintf(stderr, "\n");
}

int cmd_run(const RunFlags& flags, std::optional<std::size_t> point, const std::string& theta_text,
            const std::string& out_path) {
  samgs::RunConfig cfg = flags.resolve();
  const samgs::ProblemSpec problem = samgs::resolve_problem(cfg);
  samgs::ParamVector theta;
  if (!theta_text.empty()) {
    theta = samgs::ParamVector(parse_list(theta_text));
  } else {
    const std::size_t idx = point.value_or(cfg.initial_point_filter.empty() ? 0 : cfg.initial_point_filter.front());
    if (idx >= problem.initial_points.size()) throw samgs::Error(samgs::ErrorKind::Config, "initial point index out of range");
    theta = problem.initial_points[idx];
  }

  const samgs::TrajectoryResult result = samgs::run_trajectory(cfg, problem, theta);
  if (out_path.empty() || out_path == "-") {
    samgs::write_trajectory(std::cout, result.rows);
  } else {
    samgs::write_trajectory_file(out_path, result.rows);
  }
  const auto& v = result.verdict;
  std::fprintf(stderr, "reached=%s nearest_optimum=%zu final_distance=%s final_loss=%s steps=%lld%s\n",
               v.reached ? "true" : "false", v.nearest_optimum, samgs::format_double(v.final_distance).c_str(),
               samgs::format_double(v.final_combined_loss).c_str(), static_cast<long long>(v.steps_used),
               v.diverged ? " diverged" : "");
  return v.diverged ? kExitDiverged : kExitOk;
}

int cmd_suite(const RunFlags& flags) {
  const samgs::RunConfig cfg = flags.resolve();
  const auto report = samgs::run_suite(cfg);
  if (cfg.output_dir.empty()) std::cout << samgs::summary_to_json(report) << '\n';
  print_summary_line(report);
  return suite_exit_code(report);
}

int cmd_ablate(const RunFlags& flags, const std::string& gammas_text) {
  const samgs::RunConfig cfg = flags.resolve();
  const auto gammas = gammas_text.empty() ? samgs::default_gamma_values() : parse_list(gammas_text);
  const auto report = samgs::run_gamma_ablation(cfg, gammas);
  std::cout << samgs::ablation_to_json(report) << '\n';
  bool all_diverged = true;
  for (const auto& row : report.rows) all_diverged = all_diverged && suite_exit_code(row.summary) == kExitDiverged;
  return all_diverged ? kExitDiverged : kExitOk;
}

int cmd_sweep(const RunFlags& flags, const std::string& alphas_text) {
  const samgs::RunConfig cfg = flags.resolve();
  const auto report = samgs::run_weighting_sweep(cfg, parse_list(alphas_text));
  std::cout << samgs::sweep_to_json(report) << '\n';
  bool all_diverged = true;
  for (const auto& row : report.rows) all_diverged = all_diverged && suite_exit_code(row.summary) == kExitDiverged;
  return all_diverged ? kExitDiverged : kExitOk;
}

int cmd_delta_m(const std::string& table_path, const std::string& baseline) {
  const auto table = samgs::load_metric_table(table_path);
  const auto stl = table.metrics(baseline);
  for (const auto& method : table.methods) {
    if (method == baseline) continue;
    const double dm = samgs::delta_m_percent(table.metrics(method), stl);
    std::printf("%s\t%.4f\n", method.c_str(), dm);
  }
  return kExitOk;
}

int cmd_mean_rank(const std::string& table_path, const std::vector<std::string>& exclude) {
  const auto table = samgs::load_metric_table(table_path);
  std::vector<std::string> names;
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < table.methods.size(); ++i) {
    if (std::find(exclude.begin(), exclude.end(), table.methods[i]) != exclude.end()) continue;
    names.push_back(table.methods[i]);
    rows.push_back(table.values[i]);
  }
  const auto ranks = samgs::mean_rank(rows, table.higher_is_better);
  for (std::size_t i = 0; i < names.size(); ++i) std::printf("%s\t%.4f\n", names[i].c_str(), ranks[i]);
  return kExitOk;
}

int cmd_check_gradients(const std::string& problem_name, double alpha, std::size_t samples, std::uint64_t seed,
                        double step, double exclusion, double tolerance, double box) {
  const samgs::ProblemSpec problem = samgs::make_problem(problem_name, alpha);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coord(-box, box);
  const samgs::FdConfig fd{step};

  double worst = 0.0;
  samgs::ParamVector worst_at;
  std::size_t checked = 0;
  std::size_t attempts = 0;
  while (checked < samples && attempts < samples * 100) {
    ++attempts;
    const samgs::ParamVector theta{coord(rng), coord(rng)};
    // Kinks: theta_2 = 0 (gates) and the zero sets of the log arguments.
    const double u1 = 0.5 * (-theta[0] - 7.0) - std::tanh(-theta[1]);
    const double u2a = 0.5 * (-theta[0] + 3.0) - std::tanh(-theta[1]) + 2.0;
    const double u2b = 0.5 * (-theta[0] + 3.0) + std::tanh(-theta[1]) + 2.0;
    const double near_log = problem_name == "one_optimum" ? std::min(std::abs(u1), std::abs(u2b))
                                                          : std::min(std::abs(u1), std::abs(u2a));
    if (std::abs(theta[1]) < exclusion || near_log < exclusion) continue;

    const auto analytic = problem.gradients(theta);
    for (std::size_t k = 0; k < problem.task_count; ++k) {
      auto task_loss = [&problem, k](const samgs::ParamVector& x) { return problem.losses(x)[k]; };
      const double err = samgs::relative_error(analytic[k], samgs::fd_gradient(task_loss, theta, fd));
      if (err > worst) {
        worst = err;
        worst_at = theta;
      }
    }
    ++checked;
  }
  std::printf("problem=%s samples=%zu step=%s max_relative_error=%s", problem.name.c_str(), checked,
              samgs::format_double(step).c_str(), samgs::format_double(worst).c_str());
  if (!worst_at.empty())
    std::printf(" at=(%s,%s)", samgs::format_double(worst_at[0]).c_str(), samgs::format_double(worst_at[1]).c_str());
  std::printf(" tolerance=%s %s\n", samgs::format_double(tolerance).c_str(), worst < tolerance ? "PASS" : "FAIL");
  return worst < tolerance ? kExitOk : kExitDiverged;
}

int cmd_grid_export(const std::string& problem_name, double alpha, const std::string& range1,
                    const std::string& range2, std::size_t n1, std::size_t n2, const std::string& out_path) {
  const samgs::ProblemSpec problem = samgs::make_problem(problem_name, alpha);
  const auto r1 = parse_list(range1);
  const auto r2 = parse_list(range2);
  if (r1.size() != 2 || r2.size() != 2) throw samgs::Error(samgs::ErrorKind::Config, "ranges must be 'lo,hi'");
  const auto grid = samgs::sample_grid(
      [&problem](const samgs::ParamVector& x) {
        const auto l = problem.losses(x);
        return problem.task_weights[0] * l[0] + problem.task_weights[1] * l[1];
      },
      r1[0], r1[1], n1, r2[0], r2[1], n2);

  std::ofstream file;
  std::ostream* out = &std::cout;
  if (!out_path.empty() && out_path != "-") {
    file.open(out_path, std::ios::binary);
    if (!file) throw samgs::Error(samgs::ErrorKind::Io, "cannot write '" + out_path + "'");
    out = &file;
  }
  *out << "theta_1,theta_2,loss_1,loss_2,loss_mtl\n";
  for (std::size_t j = 0; j < grid.axis2.size(); ++j) {
    for (std::size_t i = 0; i < grid.axis1.size(); ++i) {
      const samgs::ParamVector x{grid.axis1[i], grid.axis2[j]};
      const auto l = problem.losses(x);
      *out << samgs::format_double(x[0]) << ',' << samgs::format_double(x[1]) << ',' << samgs::format_double(l[0])
           << ',' << samgs::format_double(l[1]) << ',' << samgs::format_double(grid.values[j * grid.axis1.size() + i])
           << '\n';
    }
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Similarity-aware momentum gradient surgery: toy benchmarks and metrics"};
  app.require_subcommand(1);

  RunFlags run_flags, suite_flags, ablate_flags, sweep_flags;

  auto* run = app.add_subcommand("run", "run a single trajectory and write it as CSV");
  run_flags.attach(run);
  std::optional<std::size_t> point;
  std::string theta_text, out_path;
  run->add_option("--point", point, "initial point index");
  run->add_option("--theta", theta_text, "explicit start 'x,y'");
  run->add_option("--out", out_path, "trajectory file (default stdout)");

  auto* suite = app.add_subcommand("suite", "run every initial point of a problem");
  suite_flags.attach(suite);

  auto* ablate = app.add_subcommand("ablate-gamma", "SAM-GS suite for each similarity threshold");
  ablate_flags.attach(ablate);
  std::string gammas_text;
  ablate->add_option("--gammas", gammas_text, "comma-separated list (default 0,0.1,0.3,0.5,0.7,0.9,1)");

  auto* sweep = app.add_subcommand("sweep-alpha", "suite for each task weighting L_mtl = alpha L1 + L2");
  sweep_flags.attach(sweep);
  std::string alphas_text;
  sweep->add_option("--alphas", alphas_text, "comma-separated positive weights")->required();

  auto* metrics = app.add_subcommand("metrics", "evaluation metrics over a method x task table");
  metrics->require_subcommand(1);
  auto* delta_m = metrics->add_subcommand("delta-m", "percentage change against a single-task baseline row");
  std::string dm_table, dm_baseline = "STL";
  delta_m->add_option("--table", dm_table)->required();
  delta_m->add_option("--baseline", dm_baseline);
  auto* mean_rank = metrics->add_subcommand("mean-rank", "average per-task rank of each method");
  std::string mr_table;
  std::vector<std::string> mr_exclude{"STL"};
  mean_rank->add_option("--table", mr_table)->required();
  mean_rank->add_option("--exclude", mr_exclude, "rows left out of the ranking")->delimiter(',');

  auto* check = app.add_subcommand("check-gradients", "analytic gradients vs central finite differences");
  std::string check_problem = "two_optima";
  double check_alpha = 1.0, check_step = 1e-6, check_exclusion = 1e-3, check_tol = 1e-5, check_box = 10.0;
  std::size_t check_samples = 1000;
  std::uint64_t check_seed = 0;
  check->add_option("--problem", check_problem);
  check->add_option("--alpha", check_alpha);
  check->add_option("--samples", check_samples);
  check->add_option("--seed", check_seed);
  check->add_option("--step", check_step);
  check->add_option("--exclusion", check_exclusion, "skip points this close to a kink");
  check->add_option("--tolerance", check_tol);
  check->add_option("--box", check_box, "sample from [-box, box]^2");

  auto* grid = app.add_subcommand("grid-export", "dense loss samples over a rectangle (CSV)");
  std::string grid_problem = "two_optima", range1 = "-15,15", range2 = "-15,15", grid_out;
  double grid_alpha = 1.0;
  std::size_t n1 = 301, n2 = 301;
  grid->add_option("--problem", grid_problem);
  grid->add_option("--alpha", grid_alpha);
  grid->add_option("--theta1-range", range1);
  grid->add_option("--theta2-range", range2);
  grid->add_option("--n1", n1);
  grid->add_option("--n2", n2);
  grid->add_option("--out", grid_out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*run) return cmd_run(run_flags, point, theta_text, out_path);
    if (*suite) return cmd_suite(suite_flags);
    if (*ablate) return cmd_ablate(ablate_flags, gammas_text);
    if (*sweep) return cmd_sweep(sweep_flags, alphas_text);
    if (*delta_m) return cmd_delta_m(dm_table, dm_baseline);
    if (*mean_rank) return cmd_mean_rank(mr_table, mr_exclude);
    if (*check) return cmd_check_gradients(check_problem, check_alpha, check_samples, check_seed, check_step,
                                           check_exclusion, check_tol, check_box);
    if (*grid) return cmd_grid_export(grid_problem, grid_alpha, range1, range2, n1, n2, grid_out);
  } catch (const samgs::Error& e) {
    std::fprintf(stderr, "error [%s]: %s\n", std::string(samgs::to_string(e.kind())).c_str(), e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfig;
  }
  return kExitConfig;
}
