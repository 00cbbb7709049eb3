#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "aquanet/errors.hpp"
#include "aquanet/reactions.hpp"
#include "test_support.hpp"

using namespace aquanet;

TEST(Reactions, FieldUnitsConvertToSeconds) {
  const auto p = ReactionParams::from_field_units(0.5, 0.1, 1.0, 0.5);
  EXPECT_DOUBLE_EQ(p.kb, 0.5 / 86400.0);
  EXPECT_DOUBLE_EQ(p.kw, 0.1 / 86400.0);
  EXPECT_DOUBLE_EQ(p.kf, 1.0 / 86400.0);
  EXPECT_DOUBLE_EQ(p.kr, 0.5 / 86400.0);
  EXPECT_THROW((void)ReactionParams::from_field_units(-1.0, 0.0, 0.0, 0.0), Error);
  EXPECT_THROW((void)ReactionParams::from_field_units(NAN, 0.0, 0.0, 0.0), Error);
}

TEST(Reactions, PipeDecayCombinesBulkAndWall) {
  // kw kf / (kw + kf) = 0.5, times 2 / r.
  EXPECT_DOUBLE_EQ(pipe_decay_coefficient(0.3, 1.0, 1.0, 0.5), 0.3 + 2.0);
  EXPECT_DOUBLE_EQ(pipe_decay_coefficient(0.3, 0.0, 0.0, 0.5), 0.3);
  EXPECT_DOUBLE_EQ(pipe_decay_coefficient(0.3, 0.0, 5.0, 0.5), 0.3);
  EXPECT_DOUBLE_EQ(tank_decay_coefficient(0.3), 0.3);
}

TEST(Reactions, SmallerPipesDecayFaster) {
  const double kb = 1e-5, kw = 1e-6, kf = 2e-6;
  double last = pipe_decay_coefficient(kb, kw, kf, 1.0);
  for (double r = 0.9; r > 0.01; r -= 0.05) {
    const double k = pipe_decay_coefficient(kb, kw, kf, r);
    EXPECT_GT(k, last);
    last = k;
  }
}

TEST(Reactions, RateTerms) {
  EXPECT_DOUBLE_EQ(decay_rate_term(2.0, 0.1), -0.2);
  EXPECT_DOUBLE_EQ(mutual_rate_term(2.0, 0.3, 0.5), -0.3);
  EXPECT_DOUBLE_EQ(mutual_rate_term(2.0, 0.3, 0.5), mutual_rate_term(0.3, 2.0, 0.5));
}

TEST(Reactions, DecayCoefficientsPerElement) {
  const Network net(fixtures::three_node_topology());
  const auto p = ReactionParams::from_field_units(0.5, 0.1, 1.0, 0.0);
  const auto d = decay_coefficients(net, p);
  ASSERT_EQ(d.pipe.size(), 1u);
  ASSERT_EQ(d.tank.size(), 1u);
  EXPECT_DOUBLE_EQ(d.pipe[0], pipe_decay_coefficient(p.kb, p.kw, p.kf, 0.1));
  EXPECT_DOUBLE_EQ(d.tank[0], p.kb);
}

TEST(BulkModels, NamesRoundTrip) {
  for (auto m : {BulkModel::FirstOrder, BulkModel::FirstOrderStable, BulkModel::NthOrder, BulkModel::NthOrderStable,
                 BulkModel::SecondOrderFictitious}) {
    EXPECT_EQ(parse_bulk_model(to_string(m)), m);
  }
  EXPECT_FALSE(parse_bulk_model("zeroth-order").has_value());
}

TEST(BulkModels, Rates) {
  BulkModelSpec spec;
  spec.params.kb = 0.2;
  spec.params.kr = 0.5;
  spec.params.limit = 0.5;
  spec.params.order = 2.0;

  spec.model = BulkModel::FirstOrder;
  EXPECT_EQ(bulk_model_rate(spec, 2.0, 1.0), (std::array<double, 2>{-0.4, 0.0}));
  spec.model = BulkModel::FirstOrderStable;
  EXPECT_EQ(bulk_model_rate(spec, 2.0, 1.0), (std::array<double, 2>{-0.2 * 1.5, 0.0}));
  spec.model = BulkModel::NthOrder;
  EXPECT_EQ(bulk_model_rate(spec, 2.0, 1.0), (std::array<double, 2>{-0.8, 0.0}));
  spec.model = BulkModel::NthOrderStable;
  EXPECT_EQ(bulk_model_rate(spec, 2.0, 1.0), (std::array<double, 2>{-0.2 * 1.5 * 2.0, 0.0}));
  spec.model = BulkModel::SecondOrderFictitious;
  EXPECT_EQ(bulk_model_rate(spec, 2.0, 1.0), (std::array<double, 2>{-1.0, -1.0}));
}

TEST(BulkModels, MissingParametersRejected) {
  BulkModelSpec spec;
  spec.model = BulkModel::FirstOrderStable;
  EXPECT_THROW(validate_bulk_model(spec), Error);
  spec.model = BulkModel::NthOrder;
  EXPECT_THROW(validate_bulk_model(spec), Error);
  spec.params.order = 0.5;
  EXPECT_THROW(validate_bulk_model(spec), Error);
  spec.params.order = 1.5;
  EXPECT_NO_THROW(validate_bulk_model(spec));
  EXPECT_THROW((void)bulk_model_rate(spec, -1.0, 0.0), Error);
}

TEST(ReactionProperties, MutualTermIsSymmetricAndNonpositive) {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> c(0.0, 5.0), k(0.0, 1e-3);
  for (int i = 0; i < 1000; ++i) {
    const double a = c(rng), b = c(rng), kr = k(rng);
    EXPECT_EQ(mutual_rate_term(a, b, kr), mutual_rate_term(b, a, kr));
    EXPECT_LE(mutual_rate_term(a, b, kr), 0.0);
  }
}
