// Grid-search oracle for the known optima of the synthetic problems.
//
// Prints the refined global minima as C++ initialisers; the output is what
// the known-optima tables in src/problems.cpp and src/one_optimum.cpp hold.

#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "samgs/optima_search.hpp"
#include "samgs/problems.hpp"
#include "samgs/trajectory_io.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Locate global minima of a synthetic problem by grid search"};
  std::string problem_name = "two_optima";
  double alpha = 1.0;
  samgs::OptimaSearchOptions options;
  app.add_option("--problem", problem_name, "two_optima | one_optimum");
  app.add_option("--alpha", alpha, "task weight on L1");
  app.add_option("--lower", options.box.lower);
  app.add_option("--upper", options.box.upper);
  app.add_option("--resolution", options.box.resolution);
  CLI11_PARSE(app, argc, argv);

  try {
    samgs::ProblemSpec problem = samgs::make_problem(problem_name, alpha);
    const auto optima = samgs::locate_global_minima(samgs::combined_loss_function(problem), options);
    std::printf("// %s, alpha = %s: %zu global minima\n", problem.name.c_str(), samgs::format_double(alpha).c_str(),
                optima.size());
    for (const auto& o : optima) {
      std::printf("{ParamVector{%.17g, %.17g}, %.17g},\n", o.location[0], o.location[1], o.combined_loss);
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
