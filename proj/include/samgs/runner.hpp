#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "samgs/metrics.hpp"
#include "samgs/problems.hpp"
#include "samgs/surgery.hpp"

namespace samgs {

enum class Method { SamGs, LsAdam, PcGrad, Mgda, CaGrad };

std::string_view to_string(Method method) noexcept;
Method parse_method(std::string_view text);

/// Which update consumes the aggregated direction. Auto means Adam for
/// ls_adam and the plain step theta -= lr * d for everything else.
enum class OuterOptimizer { Auto, Plain, Adam };

std::string_view to_string(OuterOptimizer opt) noexcept;
OuterOptimizer parse_outer_optimizer(std::string_view text);

struct RunConfig {
  std::string problem = "two_optima";
  Method method = Method::SamGs;
  std::int64_t max_steps = 20000;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.99;
  double gamma = 0.1;
  double epsilon = 1e-8;
  SimilarityAggregation similarity_mode = SimilarityAggregation::MeanAllPairs;
  double task_weight_alpha = 1.0;
  std::vector<std::size_t> initial_point_filter;  ///< empty = every initial point
  std::string output_dir;                         ///< empty = do not write files
  std::uint64_t seed = 0;
  bool pcgrad_shuffle = false;
  double cagrad_c = 0.5;
  OuterOptimizer outer_optimizer = OuterOptimizer::Auto;
  bool early_stop = false;
  ConvergenceTolerance tolerance;
  bool parallel = true;

  /// Throws Config on any out-of-range field.
  void validate() const;
  SamGsConfig samgs_config() const;
};

/// Reads the JSON config document; keys mirror the RunConfig fields. Unknown
/// keys are rejected.
RunConfig load_run_config(const std::string& path);
RunConfig parse_run_config(const std::string& json_text, RunConfig base = {});
std::string dump_run_config(const RunConfig& cfg);

struct TrajectoryResult {
  std::vector<TrajectoryRecord> rows;
  ConvergenceVerdict verdict;
};

/// The problem a config resolves to: named problem with weights (alpha, 1)
/// and known optima (located by grid search when alpha != 1).
ProblemSpec resolve_problem(const RunConfig& cfg);

TrajectoryResult run_trajectory(const RunConfig& cfg, const ProblemSpec& problem, const ParamVector& theta_init);
TrajectoryResult run_trajectory(const RunConfig& cfg, const ParamVector& theta_init);

struct PointSummary {
  std::size_t index = 0;
  ParamVector initial;
  ConvergenceVerdict verdict;
  std::size_t rows = 0;
  std::int64_t equalisation_steps = 0;
  std::int64_t momentum_steps = 0;
  std::string trajectory_file;
};

struct SummaryReport {
  RunConfig config;
  std::vector<KnownOptimum> optima;
  std::vector<PointSummary> points;
  std::size_t success_count = 0;
  std::size_t diverged_count = 0;
  std::optional<double> mean_steps_to_converge;
  double mean_final_loss = 0.0;
};

/// One trajectory per selected initial point. Writes <problem>_<method>_p<i>.csv
/// and summary.json under cfg.output_dir when it is set.
SummaryReport run_suite(const RunConfig& cfg);

struct AblationRow {
  double gamma = 0.0;
  SummaryReport summary;
};

struct AblationReport {
  std::vector<AblationRow> rows;
};

std::vector<double> default_gamma_values();

/// run_suite per gamma. Each gamma writes into <output_dir>/gamma_<g> when set.
AblationReport run_gamma_ablation(const RunConfig& base, const std::vector<double>& gammas);

struct SweepRow {
  double alpha = 1.0;
  SummaryReport summary;
};

struct SweepReport {
  std::vector<SweepRow> rows;
};

/// run_suite per alpha with task weights (alpha, 1). The two-optima problem
/// gets at least 30000 steps.
SweepReport run_weighting_sweep(const RunConfig& base, const std::vector<double>& alphas);

std::string summary_to_json(const SummaryReport& report);
std::string ablation_to_json(const AblationReport& report);
std::string sweep_to_json(const SweepReport& report);

}  // namespace samgs
