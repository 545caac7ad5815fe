#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "samgs/error.hpp"
#include "samgs/surgery.hpp"
#include "support/generators.hpp"
#include "support/reference_trace.hpp"

using namespace samgs;
using samgs::prop::Gen;
using samgs::prop::kPropertyCases;

namespace {

SamGsConfig config_with(double gamma, SimilarityAggregation mode = SimilarityAggregation::MeanAllPairs) {
  SamGsConfig c;
  c.gamma = gamma;
  c.similarity_mode = mode;
  return c;
}

}  // namespace

TEST(InitState, ZeroedMomenta) {
  const auto s = init_state(2, 2);
  ASSERT_EQ(s.momenta.size(), 2u);
  EXPECT_EQ(s.momenta[0], (Vector{0, 0}));
  EXPECT_EQ(s.momenta[1], (Vector{0, 0}));
  EXPECT_EQ(s.similarity_momentum, 0.0);
  EXPECT_EQ(s.step, 0);
  EXPECT_EQ(init_state(3, 2).momenta.size(), 3u);
}

TEST(InitState, RejectsSingleTask) {
  EXPECT_THROW(init_state(1, 2), Error);
  EXPECT_THROW(init_state(2, 0), Error);
}

TEST(EqualisationWeights, Examples) {
  auto w = equalisation_weights(GradientSet({Vector{3, 0}, Vector{0, 1}}));
  EXPECT_DOUBLE_EQ(w[0], 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(w[1], 2.0);
  w = equalisation_weights(GradientSet({Vector{1, 0}, Vector{1, 0}}));
  EXPECT_EQ(w, (std::vector<double>{1, 1}));
  w = equalisation_weights(GradientSet({Vector{10, 0}, Vector{0, 0}}));
  EXPECT_EQ(w, (std::vector<double>{0.5, 0}));
}

TEST(EqualisationWeights, AllZeroIsAnError) {
  try {
    equalisation_weights(GradientSet({Vector{0, 0}, Vector{0, 0}}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ZeroNorm);
  }
}

TEST(SamGsConfigTest, Validation) {
  EXPECT_NO_THROW(SamGsConfig{}.validate());
  auto bad = [](auto mutate) {
    SamGsConfig c;
    mutate(c);
    EXPECT_THROW(c.validate(), Error);
  };
  bad([](SamGsConfig& c) { c.beta1 = 1.0; });
  bad([](SamGsConfig& c) { c.beta1 = -0.1; });
  bad([](SamGsConfig& c) { c.beta2 = 1.0; });
  bad([](SamGsConfig& c) { c.gamma = 1.5; });
  bad([](SamGsConfig& c) { c.gamma = -0.1; });
  bad([](SamGsConfig& c) { c.epsilon = 0.0; });
  bad([](SamGsConfig& c) { c.alpha = 0.0; });
  bad([](SamGsConfig& c) { c.alpha = NAN; });
}

TEST(SamGsStep, IdenticalGradientsTakeMomentumBranch) {
  auto state = init_state(2, 2);
  const auto out = step(state, GradientSet({Vector{1, 0}, Vector{1, 0}}), SamGsConfig{});
  EXPECT_EQ(out.branch, Branch::Momentum);
  EXPECT_EQ(out.psi, 1.0);
  EXPECT_NEAR(state.similarity_momentum, 1e-8, 1e-22);
  const double w = 1.0 / (1e-3 + 1e-8);
  EXPECT_NEAR(out.weights[0][0], w, 1e-6 * w);
  EXPECT_EQ(out.weights[0][1], 0.0);
  EXPECT_NEAR(out.update_direction[0], 1999.98, 1e-6 * 1999.98);
  EXPECT_EQ(out.update_direction[1], 0.0);
  EXPECT_EQ(state.step, 1);
}

TEST(SamGsStep, DissimilarNormsTakeEqualisationBranch) {
  auto state = init_state(2, 2);
  const auto out = step(state, GradientSet({Vector{10, 0}, Vector{0, 1}}), config_with(0.9));
  EXPECT_EQ(out.branch, Branch::Equalisation);
  EXPECT_NEAR(out.psi_off_diagonal, 20.0 / 101.0, 1e-12);
  EXPECT_NEAR(out.psi, 0.5990099, 1e-6);
  EXPECT_NEAR(out.weights[0][0], 0.55, 1e-12);
  EXPECT_NEAR(out.weights[1][0], 5.5, 1e-12);
  EXPECT_NEAR(out.update_direction[0], 5.5, 5.5e-6);
  EXPECT_NEAR(out.update_direction[1], 5.5, 5.5e-6);
}

TEST(SamGsStep, ZeroGradientsAreAFixedPoint) {
  auto state = init_state(2, 2);
  for (int i = 0; i < 3; ++i) {
    const auto out = step(state, GradientSet({Vector{0, 0}, Vector{0, 0}}), SamGsConfig{});
    EXPECT_EQ(out.branch, Branch::Momentum);
    EXPECT_EQ(out.update_direction, (Vector{0, 0}));
  }
}

TEST(SamGsStep, MismatchedStateIsRejectedAndUntouched) {
  auto state = init_state(3, 2);
  const auto before = state;
  EXPECT_THROW(step(state, GradientSet({Vector{1, 0}, Vector{0, 1}}), SamGsConfig{}), Error);
  EXPECT_EQ(state, before);
  auto s2 = init_state(2, 3);
  EXPECT_THROW(step(s2, GradientSet({Vector{1, 0}, Vector{0, 1}}), SamGsConfig{}), Error);
}

TEST(SamGsStep, NonFiniteIntermediateNamesTheQuantity) {
  auto state = init_state(2, 1);
  state.step = 4;
  const auto before = state;
  try {
    // norms, m and w stay finite; w * g overflows
    step(state, GradientSet({Vector{1e153}, Vector{1e153}}), SamGsConfig{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NonFinite);
    EXPECT_NE(std::string(e.what()).find("update direction"), std::string::npos) << e.what();
  }
  EXPECT_EQ(state, before);
}

TEST(SamGsStep, MatchesIndependentTraceBitForBit) {
  for (std::size_t k : {2u, 3u, 5u}) {
    for (auto mode : {SimilarityAggregation::MeanAllPairs, SimilarityAggregation::MinOffDiagonal}) {
      Gen gen(1000 + k);
      const auto seq = prop::random_gradient_sequence(gen, k, 4, 10);
      SamGsConfig cfg;
      cfg.beta2 = 0.9;
      cfg.gamma = 0.6;
      cfg.similarity_mode = mode;
      const auto reference = prop::reference_trace(seq, cfg);
      auto state = init_state(k, 4);
      for (std::size_t t = 0; t < seq.size(); ++t) {
        const auto out = step(state, GradientSet(seq[t]), cfg);
        EXPECT_EQ(out.update_direction.values(), reference[t].direction) << "K=" << k << " t=" << t;
        EXPECT_EQ(out.branch == Branch::Equalisation, reference[t].equalised);
        EXPECT_EQ(out.psi, reference[t].psi);
        EXPECT_EQ(state.similarity_momentum, reference[t].h);
      }
    }
  }
}

TEST(SamGsProperties, DeterministicState) {
  Gen gen(201);
  for (int i = 0; i < 200; ++i) {
    const auto g = gen.gradients(gen.index(2, 5), gen.index(1, 4));
    auto a = init_state(g.task_count(), g.dimension());
    auto b = a;
    SamGsConfig cfg = config_with(gen.uniform(0, 1));
    const auto oa = step(a, g, cfg);
    const auto ob = step(b, g, cfg);
    EXPECT_EQ(a, b);
    EXPECT_EQ(oa.update_direction, ob.update_direction);
  }
}

TEST(SamGsProperties, EqualisedGradientsShareTheMeanNorm) {
  Gen gen(202);
  for (int i = 0; i < kPropertyCases; ++i) {
    std::vector<Vector> g;
    const std::size_t k = gen.index(2, 5), m = gen.index(1, 5);
    for (std::size_t j = 0; j < k; ++j) g.push_back(gen.coin() && j > 0 ? Vector(m) : gen.nonzero_vector(m, -3, 3));
    const GradientSet grads(g);
    const auto w = equalisation_weights(grads);
    double mean = 0;
    for (double n : grads.norms()) mean += n;
    mean /= static_cast<double>(k);
    for (std::size_t j = 0; j < k; ++j) {
      if (grads[j].is_zero()) {
        EXPECT_EQ(w[j], 0.0);
      } else {
        EXPECT_LE(prop::rel_diff(l2_norm(w[j] * grads[j]), mean), 1e-10);
      }
    }
  }
}

TEST(SamGsProperties, BranchFollowsThreshold) {
  Gen gen(203);
  for (int i = 0; i < kPropertyCases; ++i) {
    const auto g = gen.gradients(gen.index(2, 4), 3);
    const auto mode = gen.coin() ? SimilarityAggregation::MeanAllPairs : SimilarityAggregation::MinOffDiagonal;
    const double gamma = gen.uniform(0, 1);
    auto s = init_state(g.task_count(), 3);
    const auto out = step(s, g, config_with(gamma, mode));
    EXPECT_EQ(out.branch == Branch::Equalisation, out.psi < gamma);

    auto s0 = init_state(g.task_count(), 3);
    EXPECT_EQ(step(s0, g, config_with(0.0, mode)).branch, Branch::Momentum);

    auto s1 = init_state(g.task_count(), 3);
    EXPECT_EQ(step(s1, g, config_with(1.0, SimilarityAggregation::MinOffDiagonal)).branch, Branch::Equalisation);
  }
}

TEST(SamGsProperties, BiasCorrectionRecoversConstantGradient) {
  Gen gen(204);
  for (int i = 0; i < 100; ++i) {
    const auto g = gen.gradients(gen.index(2, 4), 3);
    SamGsConfig cfg;
    cfg.beta1 = gen.uniform(0, 0.99);
    auto s = init_state(g.task_count(), 3);
    const std::size_t steps = gen.index(1, 60);
    for (std::size_t t = 0; t < steps; ++t) step(s, g, cfg);
    const double corr = 1.0 - std::pow(cfg.beta1, static_cast<double>(s.step));
    for (std::size_t k = 0; k < g.task_count(); ++k)
      for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(s.momenta[k][j] / corr, g[k][j], 1e-12 * (1 + std::abs(g[k][j])));
  }
}

TEST(SamGsProperties, SmallerPsiGivesLargerH) {
  Gen gen(205);
  for (int i = 0; i < kPropertyCases; ++i) {
    const std::size_t m = 2;
    const Vector a = gen.nonzero_vector(m);
    const double c1 = gen.uniform(0.05, 1.0), c2 = gen.uniform(0.05, 1.0);
    const double lo = std::min(c1, c2), hi = std::max(c1, c2);
    if (hi - lo < 1e-6) continue;
    auto base = init_state(2, m);
    base.similarity_momentum = gen.uniform(0, 1);
    base.step = static_cast<std::int64_t>(gen.index(0, 20));
    auto s_low = base, s_high = base;
    const auto o_low = step(s_low, GradientSet({a, lo * a}), config_with(0.0));
    const auto o_high = step(s_high, GradientSet({a, hi * a}), config_with(0.0));
    ASSERT_LT(o_low.psi, o_high.psi);
    EXPECT_GT(s_low.similarity_momentum, s_high.similarity_momentum);
    // same momenta history and the same first gradient: smaller psi, smaller weight on task 1
    EXPECT_LE(o_low.weights[0][0], o_high.weights[0][0]);
    EXPECT_GE(s_low.similarity_momentum, 0.0);
  }
}

TEST(SamGsProperties, MomentumWeightsAreNonNegative) {
  Gen gen(206);
  for (int i = 0; i < 100; ++i) {
    const std::size_t k = gen.index(2, 4);
    auto s = init_state(k, 3);
    for (int t = 0; t < 10; ++t) {
      const auto out = step(s, gen.gradients(k, 3), config_with(0.0));
      for (const auto& w : out.weights)
        for (double x : w) EXPECT_GE(x, 0.0);
    }
  }
}

TEST(SamGsProperties, EqualisationIsRotationEquivariant) {
  Gen gen(207);
  for (int i = 0; i < kPropertyCases; ++i) {
    const std::size_t k = gen.index(2, 4), m = gen.index(2, 4);
    const auto g = gen.gradients(k, m);
    const auto q = gen.rotation(m);
    std::vector<Vector> rotated;
    for (const auto& v : g) rotated.push_back(prop::apply(q, v));
    auto s1 = init_state(k, m), s2 = init_state(k, m);
    const auto o1 = step(s1, g, config_with(1.0, SimilarityAggregation::MinOffDiagonal));
    const auto o2 = step(s2, GradientSet(rotated), config_with(1.0, SimilarityAggregation::MinOffDiagonal));
    ASSERT_EQ(o1.branch, Branch::Equalisation);
    const Vector expected = prop::apply(q, o1.update_direction);
    const double scale = 1.0 + l2_norm(expected);
    for (std::size_t j = 0; j < m; ++j) EXPECT_NEAR(o2.update_direction[j], expected[j], 1e-10 * scale);
  }
}

TEST(StateSerialization, RoundTripContinuesBitIdentically) {
  Gen gen(208);
  for (std::size_t k : {2u, 3u}) {
    SamGsConfig cfg = config_with(0.4, SimilarityAggregation::MinOffDiagonal);
    cfg.beta2 = 0.95;
    auto s = init_state(k, 3);
    for (int t = 0; t < 7; ++t) step(s, gen.gradients(k, 3), cfg);
    const auto text = serialize_state(s, cfg);
    auto loaded = deserialize_state(text);
    EXPECT_EQ(loaded.state, s);
    EXPECT_EQ(loaded.config.beta2, cfg.beta2);
    EXPECT_EQ(loaded.config.similarity_mode, cfg.similarity_mode);
    for (int t = 0; t < 5; ++t) {
      const auto g = gen.gradients(k, 3);
      const auto a = step(s, g, cfg);
      const auto b = step(loaded.state, g, loaded.config);
      EXPECT_EQ(a.update_direction, b.update_direction);
    }
    EXPECT_EQ(serialize_state(s, cfg), serialize_state(loaded.state, loaded.config));
  }
}

TEST(StateSerialization, RejectsMalformedDocuments) {
  EXPECT_THROW(deserialize_state("not json"), Error);
  EXPECT_THROW(deserialize_state(R"({"format":"other"})"), Error);
  auto s = init_state(2, 2);
  std::string text = serialize_state(s, SamGsConfig{});
  text.replace(text.find("\"dimension\": 2"), 14, "\"dimension\": 3");
  EXPECT_THROW(deserialize_state(text), Error);
}

TEST(BranchNames, Strings) {
  EXPECT_EQ(to_string(Branch::Equalisation), "equalisation");
  EXPECT_EQ(to_string(Branch::Momentum), "momentum");
}
