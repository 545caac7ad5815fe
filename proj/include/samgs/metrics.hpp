#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "samgs/problems.hpp"

namespace samgs {

struct TaskMetric {
  double value = 0.0;
  bool higher_is_better = false;
};

/// Mean signed relative change against single-task baselines, in percent.
/// Lower is better.
double delta_m_percent(std::span<const TaskMetric> mtl, std::span<const TaskMetric> stl);

/// Per-method mean rank across tasks. `results[method][task]`; rank 1 is best
/// under each task's direction; ties share the mean of their positions.
std::vector<double> mean_rank(const std::vector<std::vector<double>>& results,
                              const std::vector<bool>& higher_is_better);

/// Method x task table with a direction-flag row. Text layout:
///
///   method,<task 1>,<task 2>,...
///   direction,higher,lower,...
///   <name>,<value>,<value>,...
///
/// Blank lines and lines starting with '#' are skipped. The delimiter is
/// detected from the header (',' ';' or tab).
struct MetricTable {
  std::vector<std::string> tasks;
  std::vector<bool> higher_is_better;
  std::vector<std::string> methods;
  std::vector<std::vector<double>> values;

  const std::vector<double>& row(const std::string& method) const;
  std::vector<TaskMetric> metrics(const std::string& method) const;
};

MetricTable parse_metric_table(std::istream& in);
MetricTable load_metric_table(const std::string& path);

/// One logged optimisation step (row 0 holds the initial point).
struct TrajectoryRecord {
  std::int64_t t = 0;
  ParamVector theta;
  std::vector<double> task_losses;
  double combined_loss = 0.0;
  std::optional<double> psi;
  std::optional<std::string> branch;
  std::vector<double> gradient_norms;
};

struct ConvergenceVerdict {
  bool reached = false;
  std::optional<std::size_t> which_optimum;  ///< index into the known optima
  std::size_t nearest_optimum = 0;
  double final_distance = 0.0;
  double final_combined_loss = 0.0;
  std::int64_t steps_used = 0;  ///< for reached runs: first t after which the run stays converged
  bool diverged = false;
};

struct ConvergenceTolerance {
  double distance = 0.1;
  double loss = 1e-3;
};

/// Reached iff the final point lies within tol.distance of a known optimum,
/// or its combined loss is within tol.loss above the best optimum value.
ConvergenceVerdict classify_convergence(std::span<const TrajectoryRecord> trajectory,
                                        std::span<const KnownOptimum> optima, const ConvergenceTolerance& tol = {});

}  // namespace samgs
