#pragma once

#include <functional>
#include <vector>

#include "samgs/problems.hpp"

namespace samgs {

struct SearchBox {
  double lower = -15.0;
  double upper = 15.0;
  double resolution = 0.01;
};

struct OptimaSearchOptions {
  SearchBox box;
  std::size_t max_candidates = 64;   ///< lowest grid-local minima that get refined
  double refine_tolerance = 1e-12;   ///< final pattern-search spacing
  double value_tolerance = 1e-6;     ///< how far above the best a minimum may sit and still count as global
  double merge_distance = 1e-6;
  std::size_t max_refine_moves = 5000;  ///< per candidate; stops crawls along thin curved valleys
};

/// Brute-force grid scan of a 2-D objective followed by local pattern-search
/// refinement. Returns every minimum whose value is within value_tolerance
/// of the best found, ordered by first coordinate.
std::vector<KnownOptimum> locate_global_minima(const std::function<double(const ParamVector&)>& objective,
                                               const OptimaSearchOptions& options = {});

struct GridSample {
  std::vector<double> axis1;
  std::vector<double> axis2;
  std::vector<double> values;  ///< row-major, values[i2 * axis1.size() + i1]
};

/// Dense samples of an objective over a rectangle, inclusive of both ends.
GridSample sample_grid(const std::function<double(const ParamVector&)>& objective, double lo1, double hi1,
                       std::size_t n1, double lo2, double hi2, std::size_t n2);

}  // namespace samgs
