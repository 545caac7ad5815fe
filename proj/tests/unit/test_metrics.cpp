#include <cmath>
#include <numeric>
#include <sstream>

#include <gtest/gtest.h>

#include "samgs/error.hpp"
#include "samgs/metrics.hpp"
#include "support/generators.hpp"

using namespace samgs;
using samgs::prop::Gen;
using samgs::prop::kPropertyCases;

namespace {

std::vector<TaskMetric> metrics_of(std::initializer_list<std::pair<double, bool>> items) {
  std::vector<TaskMetric> out;
  for (auto [v, h] : items) out.push_back({v, h});
  return out;
}

TrajectoryRecord rec(std::int64_t t, ParamVector theta, double loss) {
  TrajectoryRecord r;
  r.t = t;
  r.theta = std::move(theta);
  r.combined_loss = loss;
  return r;
}

}  // namespace

TEST(DeltaM, IdenticalIsZero) {
  const auto m = metrics_of({{72.0, true}, {0.014, false}, {30.1, false}});
  EXPECT_EQ(delta_m_percent(m, m), 0.0);
}

TEST(DeltaM, CityscapesUwRow) {
  const auto mtl = metrics_of({{72.0, true}, {92.8, true}, {0.014, false}, {30.1, false}});
  const auto stl = metrics_of({{74.01, true}, {93.16, true}, {0.0125, false}, {27.77, false}});
  EXPECT_NEAR(delta_m_percent(mtl, stl), 5.89, 0.05);
}

TEST(DeltaM, SingleHigherIsBetterTask) {
  EXPECT_NEAR(delta_m_percent(metrics_of({{110, true}}), metrics_of({{100, true}})), -10.0, 1e-12);
}

TEST(DeltaM, Errors) {
  EXPECT_THROW(delta_m_percent(metrics_of({{1, true}}), metrics_of({{0, true}})), Error);
  EXPECT_THROW(delta_m_percent(metrics_of({{1, true}}), metrics_of({{1, true}, {2, true}})), Error);
  EXPECT_THROW(delta_m_percent(metrics_of({}), metrics_of({})), Error);
  EXPECT_THROW(delta_m_percent(metrics_of({{NAN, true}}), metrics_of({{1, true}})), Error);
}

TEST(DeltaMProperties, InvariantToPerTaskRescaling) {
  Gen gen(501);
  for (int i = 0; i < kPropertyCases; ++i) {
    const std::size_t k = gen.index(1, 6);
    std::vector<TaskMetric> mtl, stl, mtl2, stl2;
    for (std::size_t j = 0; j < k; ++j) {
      const bool h = gen.coin();
      mtl.push_back({gen.uniform(0.1, 100), h});
      stl.push_back({gen.uniform(0.1, 100), h});
    }
    mtl2 = mtl;
    stl2 = stl;
    const std::size_t j = gen.index(0, k - 1);
    const double s = std::pow(10.0, gen.uniform(-3, 3));
    mtl2[j].value *= s;
    stl2[j].value *= s;
    const double a = delta_m_percent(mtl, stl), b = delta_m_percent(mtl2, stl2);
    EXPECT_NEAR(a, b, 1e-9 * (1 + std::abs(a)));
  }
}

TEST(DeltaMProperties, DirectionFlipNegates) {
  Gen gen(502);
  for (int i = 0; i < kPropertyCases; ++i) {
    const double m = gen.uniform(0.1, 10), s = gen.uniform(0.1, 10);
    EXPECT_EQ(delta_m_percent(metrics_of({{m, true}}), metrics_of({{s, true}})),
              -delta_m_percent(metrics_of({{m, false}}), metrics_of({{s, false}})));
  }
}

TEST(MeanRank, Examples) {
  EXPECT_EQ(mean_rank({{2, 2}, {1, 1}}, {true, true}), (std::vector<double>{1, 2}));
  EXPECT_EQ(mean_rank({{2, 1}, {1, 2}}, {true, true}), (std::vector<double>{1.5, 1.5}));
  EXPECT_EQ(mean_rank({{5}, {5}, {1}}, {true}), (std::vector<double>{1.5, 1.5, 3}));
  EXPECT_EQ(mean_rank({{5}, {5}, {1}}, {false}), (std::vector<double>{2.5, 2.5, 1}));
}

TEST(MeanRank, Errors) {
  EXPECT_THROW(mean_rank({{1}}, {true}), Error);
  EXPECT_THROW(mean_rank({{1}, {1, 2}}, {true}), Error);
  EXPECT_THROW(mean_rank({{1}, {NAN}}, {true}), Error);
}

TEST(MeanRankProperties, RangeAndRankSum) {
  Gen gen(503);
  for (int i = 0; i < kPropertyCases; ++i) {
    const std::size_t n = gen.index(2, 12), k = gen.index(1, 5);
    std::vector<std::vector<double>> r(n, std::vector<double>(k));
    std::vector<bool> higher(k);
    for (std::size_t t = 0; t < k; ++t) higher[t] = gen.coin();
    // coarse values so ties are common
    for (auto& row : r)
      for (double& v : row) v = static_cast<double>(gen.index(0, 4));
    const auto mr = mean_rank(r, higher);
    for (double v : mr) {
      EXPECT_GE(v, 1.0);
      EXPECT_LE(v, static_cast<double>(n));
    }
    const double total = std::accumulate(mr.begin(), mr.end(), 0.0) * static_cast<double>(k);
    EXPECT_NEAR(total, static_cast<double>(k * n * (n + 1)) / 2.0, 1e-9);
  }
}

TEST(MetricTableParse, CommaSemicolonTab) {
  for (const char* text : {"method,a,b\ndirection,higher,lower\nX,1,2\nY,3,4\n",
                           "# comment\nmethod;a;b\n\ndirection;up;down\nX;1;2\nY;3;4\n",
                           "method\ta\tb\ndirection\t+\t-\nX\t1\t2\nY\t3\t4\n"}) {
    std::istringstream in(text);
    const auto t = parse_metric_table(in);
    EXPECT_EQ(t.tasks, (std::vector<std::string>{"a", "b"}));
    EXPECT_EQ(t.higher_is_better, (std::vector<bool>{true, false}));
    EXPECT_EQ(t.methods, (std::vector<std::string>{"X", "Y"}));
    EXPECT_EQ(t.row("Y"), (std::vector<double>{3, 4}));
    EXPECT_EQ(t.metrics("X")[1].higher_is_better, false);
  }
}

TEST(MetricTableParse, Errors) {
  auto parse = [](const char* text) {
    std::istringstream in(text);
    return parse_metric_table(in);
  };
  EXPECT_THROW(parse("method,a\n"), Error);
  EXPECT_THROW(parse("method,a\ndirection,sideways\nX,1\n"), Error);
  EXPECT_THROW(parse("method,a\ndirection,higher\nX,1,2\n"), Error);
  EXPECT_THROW(parse("method,a\ndirection,higher\nX,abc\n"), Error);
  EXPECT_THROW(parse("method,a\ndirection,higher\nX,1\n").row("Z"), Error);
  EXPECT_THROW(load_metric_table("/nonexistent/table.csv"), Error);
}

TEST(Convergence, ExactHit) {
  const std::vector<KnownOptimum> optima{{{-1, 0}, -5}, {{1, 0}, -5}};
  const std::vector<TrajectoryRecord> traj{rec(0, {3, 3}, 10), rec(1, {1, 0}, -5)};
  const auto v = classify_convergence(traj, optima);
  EXPECT_TRUE(v.reached);
  EXPECT_EQ(v.which_optimum, 1u);
  EXPECT_EQ(v.final_distance, 0.0);
  EXPECT_EQ(v.steps_used, 1);
}

TEST(Convergence, FarAway) {
  const std::vector<KnownOptimum> optima{{{0, 0}, -5}};
  const std::vector<TrajectoryRecord> traj{rec(0, {9, 9}, 10)};
  const auto v = classify_convergence(traj, optima);
  EXPECT_FALSE(v.reached);
  EXPECT_FALSE(v.which_optimum.has_value());
  EXPECT_NEAR(v.final_distance, std::sqrt(162.0), 1e-12);
}

TEST(Convergence, LossRuleAloneIsEnough) {
  const std::vector<KnownOptimum> optima{{{0, 0}, -5}};
  const std::vector<TrajectoryRecord> traj{rec(0, {9, 9}, -4.9995)};
  EXPECT_TRUE(classify_convergence(traj, optima).reached);
}

TEST(Convergence, StepsUsedIsWhenTheRunSettles) {
  const std::vector<KnownOptimum> optima{{{0, 0}, -5}};
  const std::vector<TrajectoryRecord> traj{rec(0, {1, 0}, 0), rec(1, {0.01, 0}, -4.9), rec(2, {1, 0}, 0),
                                           rec(3, {0.05, 0}, -4.9), rec(4, {0.0, 0}, -5)};
  EXPECT_EQ(classify_convergence(traj, optima).steps_used, 3);
}

TEST(Convergence, EmptyTrajectoryRejected) {
  const std::vector<KnownOptimum> optima{{{0, 0}, -5}};
  EXPECT_THROW(classify_convergence(std::vector<TrajectoryRecord>{}, optima), Error);
}
