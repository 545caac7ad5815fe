#include "samgs/optima_search.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <thread>

#include "samgs/error.hpp"

namespace samgs {

namespace {

// Compass search: move to the best of the 8 neighbours at the current
// spacing, halve the spacing when the centre is already best. A successful
// move doubles the spacing again (capped at the start value) so long shallow
// valleys are crossed in few steps.
KnownOptimum refine(const std::function<double(const ParamVector&)>& f, ParamVector x, double spacing,
                    double tolerance, std::size_t max_moves) {
  double fx = f(x);
  const double max_spacing = spacing;
  std::size_t moves = 0;
  while (spacing > tolerance && moves < max_moves) {
    ParamVector best = x;
    double best_f = fx;
    for (int di = -1; di <= 1; ++di) {
      for (int dj = -1; dj <= 1; ++dj) {
        if (di == 0 && dj == 0) continue;
        ParamVector y{x[0] + di * spacing, x[1] + dj * spacing};
        const double fy = f(y);
        if (fy < best_f) {
          best_f = fy;
          best = y;
        }
      }
    }
    if (best_f < fx) {
      x = best;
      fx = best_f;
      spacing = std::min(2.0 * spacing, max_spacing);
      ++moves;
    } else {
      spacing *= 0.5;
    }
  }
  return {x, fx};
}

}  // namespace

GridSample sample_grid(const std::function<double(const ParamVector&)>& objective, double lo1, double hi1,
                       std::size_t n1, double lo2, double hi2, std::size_t n2) {
  if (n1 < 2 || n2 < 2 || !(hi1 > lo1) || !(hi2 > lo2)) {
    throw Error(ErrorKind::InvalidArgument, "sample_grid: need at least 2 samples per axis over a non-empty range");
  }
  GridSample grid;
  grid.axis1.resize(n1);
  grid.axis2.resize(n2);
  for (std::size_t i = 0; i < n1; ++i) grid.axis1[i] = lo1 + (hi1 - lo1) * static_cast<double>(i) / (n1 - 1);
  for (std::size_t j = 0; j < n2; ++j) grid.axis2[j] = lo2 + (hi2 - lo2) * static_cast<double>(j) / (n2 - 1);
  grid.values.resize(n1 * n2);

  // Rows are independent; split them across threads. Each cell is written once.
  auto fill_rows = [&](std::size_t first, std::size_t last) {
    for (std::size_t j = first; j < last; ++j)
      for (std::size_t i = 0; i < n1; ++i) grid.values[j * n1 + i] = objective(ParamVector{grid.axis1[i], grid.axis2[j]});
  };
  const std::size_t workers = std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, 16);
  if (workers == 1 || n1 * n2 < 100000) {
    fill_rows(0, n2);
    return grid;
  }
  std::vector<std::future<void>> jobs;
  const std::size_t chunk = (n2 + workers - 1) / workers;
  for (std::size_t first = 0; first < n2; first += chunk)
    jobs.push_back(std::async(std::launch::async, fill_rows, first, std::min(first + chunk, n2)));
  for (auto& job : jobs) job.get();
  return grid;
}

std::vector<KnownOptimum> locate_global_minima(const std::function<double(const ParamVector&)>& objective,
                                               const OptimaSearchOptions& options) {
  const auto& box = options.box;
  const auto n = static_cast<std::size_t>(std::llround((box.upper - box.lower) / box.resolution)) + 1;
  const GridSample grid = sample_grid(objective, box.lower, box.upper, n, box.lower, box.upper, n);

  struct Candidate {
    double value;
    std::size_t i;
    std::size_t j;
  };
  std::vector<Candidate> candidates;
  for (std::size_t j = 1; j + 1 < n; ++j) {
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double v = grid.values[j * n + i];
      bool is_min = std::isfinite(v);
      for (int dj = -1; dj <= 1 && is_min; ++dj)
        for (int di = -1; di <= 1 && is_min; ++di)
          if ((di || dj) && grid.values[(j + dj) * n + (i + di)] < v) is_min = false;
      if (is_min) candidates.push_back({v, i, j});
    }
  }
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    return a.value != b.value ? a.value < b.value : (a.j != b.j ? a.j < b.j : a.i < b.i);
  });
  if (candidates.size() > options.max_candidates) candidates.resize(options.max_candidates);

  std::vector<KnownOptimum> refined;
  for (const auto& c : candidates) {
    auto opt = refine(objective, ParamVector{grid.axis1[c.i], grid.axis2[c.j]}, box.resolution,
                      options.refine_tolerance, options.max_refine_moves);
    const bool duplicate = std::any_of(refined.begin(), refined.end(), [&](const KnownOptimum& o) {
      return distance(o.location, opt.location) < options.merge_distance;
    });
    if (!duplicate) refined.push_back(std::move(opt));
  }
  if (refined.empty()) return refined;

  double best = std::numeric_limits<double>::infinity();
  for (const auto& o : refined) best = std::min(best, o.combined_loss);
  std::vector<KnownOptimum> global;
  for (auto& o : refined)
    if (o.combined_loss <= best + options.value_tolerance * std::max(1.0, std::abs(best))) global.push_back(o);
  std::sort(global.begin(), global.end(),
            [](const KnownOptimum& a, const KnownOptimum& b) { return a.location[0] < b.location[0]; });
  return global;
}

}  // namespace samgs
