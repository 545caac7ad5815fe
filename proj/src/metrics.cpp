#include "samgs/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <sstream>

#include "samgs/error.hpp"

namespace samgs {

double delta_m_percent(std::span<const TaskMetric> mtl, std::span<const TaskMetric> stl) {
  if (mtl.size() != stl.size() || mtl.empty()) {
    throw Error(ErrorKind::DimensionMismatch, "delta_m_percent: need equal, non-empty metric lists");
  }
  double sum = 0.0;
  for (std::size_t k = 0; k < mtl.size(); ++k) {
    if (!std::isfinite(mtl[k].value) || !std::isfinite(stl[k].value)) {
      throw Error(ErrorKind::NonFinite, "delta_m_percent: non-finite metric");
    }
    if (stl[k].value == 0.0) throw Error(ErrorKind::InvalidArgument, "delta_m_percent: zero single-task baseline");
    const double sign = stl[k].higher_is_better ? -1.0 : 1.0;
    sum += sign * (mtl[k].value - stl[k].value) / stl[k].value;
  }
  return sum / static_cast<double>(mtl.size()) * 100.0;
}

std::vector<double> mean_rank(const std::vector<std::vector<double>>& results,
                              const std::vector<bool>& higher_is_better) {
  const std::size_t n_methods = results.size();
  const std::size_t n_tasks = higher_is_better.size();
  if (n_methods < 2 || n_tasks < 1) throw Error(ErrorKind::InvalidArgument, "mean_rank: need >= 2 methods and >= 1 task");
  for (const auto& row : results) {
    if (row.size() != n_tasks) throw Error(ErrorKind::DimensionMismatch, "mean_rank: ragged result matrix");
    for (double v : row)
      if (!std::isfinite(v)) throw Error(ErrorKind::NonFinite, "mean_rank: non-finite entry");
  }

  std::vector<double> total(n_methods, 0.0);
  std::vector<std::size_t> order(n_methods);
  for (std::size_t task = 0; task < n_tasks; ++task) {
    // Score where smaller is better.
    auto score = [&](std::size_t m) { return higher_is_better[task] ? -results[m][task] : results[m][task]; };
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return score(a) < score(b); });
    for (std::size_t pos = 0; pos < n_methods;) {
      std::size_t end = pos + 1;
      while (end < n_methods && score(order[end]) == score(order[pos])) ++end;
      // positions pos..end-1 are tied; 1-based ranks pos+1..end
      const double shared = (static_cast<double>(pos + 1) + static_cast<double>(end)) / 2.0;
      for (std::size_t q = pos; q < end; ++q) total[order[q]] += shared;
      pos = end;
    }
  }
  for (double& t : total) t /= static_cast<double>(n_tasks);
  return total;
}

const std::vector<double>& MetricTable::row(const std::string& method) const {
  const auto it = std::find(methods.begin(), methods.end(), method);
  if (it == methods.end()) throw Error(ErrorKind::InvalidArgument, "metric table has no method '" + method + "'");
  return values[static_cast<std::size_t>(it - methods.begin())];
}

std::vector<TaskMetric> MetricTable::metrics(const std::string& method) const {
  const auto& r = row(method);
  std::vector<TaskMetric> out;
  for (std::size_t k = 0; k < r.size(); ++k) out.push_back({r[k], higher_is_better[k]});
  return out;
}

namespace {

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

std::vector<std::string> split(const std::string& line, char delim) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, delim)) fields.push_back(trim(field));
  if (!line.empty() && line.back() == delim) fields.emplace_back();
  return fields;
}

bool parse_direction(const std::string& text, std::size_t line_no) {
  std::string t = text;
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
  if (t == "higher" || t == "up" || t == "+" || t == "max") return true;
  if (t == "lower" || t == "down" || t == "-" || t == "min") return false;
  throw Error(ErrorKind::Parse, "metric table line " + std::to_string(line_no) + ": bad direction flag '" + text + "'");
}

double parse_number(const std::string& text, std::size_t line_no) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || text.empty()) {
    throw Error(ErrorKind::Parse, "metric table line " + std::to_string(line_no) + ": bad number '" + text + "'");
  }
  return v;
}

}  // namespace

MetricTable parse_metric_table(std::istream& in) {
  MetricTable table;
  std::string line;
  std::size_t line_no = 0;
  char delim = ',';
  enum { Header, Direction, Rows } stage = Header;

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped.front() == '#') continue;

    if (stage == Header) {
      for (char c : {'\t', ';', ','})
        if (stripped.find(c) != std::string::npos) delim = c;
      auto fields = split(stripped, delim);
      if (fields.size() < 2) throw Error(ErrorKind::Parse, "metric table: header needs a method column and >= 1 task");
      table.tasks.assign(fields.begin() + 1, fields.end());
      stage = Direction;
      continue;
    }

    auto fields = split(stripped, delim);
    if (fields.size() != table.tasks.size() + 1) {
      throw Error(ErrorKind::Parse, "metric table line " + std::to_string(line_no) + ": expected " +
                                        std::to_string(table.tasks.size() + 1) + " fields, got " +
                                        std::to_string(fields.size()));
    }
    if (stage == Direction) {
      for (std::size_t k = 1; k < fields.size(); ++k) table.higher_is_better.push_back(parse_direction(fields[k], line_no));
      stage = Rows;
      continue;
    }
    table.methods.push_back(fields[0]);
    std::vector<double> row;
    for (std::size_t k = 1; k < fields.size(); ++k) row.push_back(parse_number(fields[k], line_no));
    table.values.push_back(std::move(row));
  }
  if (stage != Rows) throw Error(ErrorKind::Parse, "metric table: missing header or direction row");
  return table;
}

MetricTable load_metric_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open metric table '" + path + "'");
  return parse_metric_table(in);
}

ConvergenceVerdict classify_convergence(std::span<const TrajectoryRecord> trajectory,
                                        std::span<const KnownOptimum> optima, const ConvergenceTolerance& tol) {
  if (trajectory.empty()) throw Error(ErrorKind::InvalidArgument, "classify_convergence: empty trajectory");

  double best_loss = std::numeric_limits<double>::infinity();
  for (const auto& o : optima) best_loss = std::min(best_loss, o.combined_loss);

  struct Assessment {
    bool reached;
    std::size_t nearest;
    double dist;
  };
  auto assess = [&](const TrajectoryRecord& row) {
    Assessment a{false, 0, std::numeric_limits<double>::infinity()};
    for (std::size_t i = 0; i < optima.size(); ++i) {
      const double d = distance(row.theta, optima[i].location);
      if (d < a.dist) {
        a.dist = d;
        a.nearest = i;
      }
    }
    a.reached = !optima.empty() && (a.dist <= tol.distance || row.combined_loss <= best_loss + tol.loss);
    return a;
  };

  const auto& last = trajectory.back();
  const Assessment final_state = assess(last);
  ConvergenceVerdict v;
  v.reached = final_state.reached;
  v.nearest_optimum = final_state.nearest;
  v.final_distance = final_state.dist;
  v.final_combined_loss = last.combined_loss;
  if (v.reached) {
    v.which_optimum = final_state.nearest;
    std::size_t first = trajectory.size() - 1;
    while (first > 0 && assess(trajectory[first - 1]).reached) --first;
    v.steps_used = trajectory[first].t;
  } else {
    v.steps_used = last.t;
  }
  return v;
}

}  // namespace samgs
