#include <gtest/gtest.h>

#include <sstream>

#include "aerm/model.hpp"
#include "aerm/sample.hpp"

using namespace aerm;

TEST(EmpiricalRisk, BernoulliCountsMismatches) {
  const auto model = ModelSpec::bernoulli_mode();
  const auto s = LabeledSample::labels_only({0, 1, 1});
  EXPECT_DOUBLE_EQ(empirical_risk(model, s, Vector{0.0}), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(empirical_risk(model, s, Vector{1.0}), 1.0 / 3.0);
}

TEST(EmpiricalRisk, LinearExactFitIsZero) {
  const auto model = ModelSpec::l1_linear(10, 1);
  const LabeledSample s(std::vector<Vector>{{1}, {2}}, {1, 2});
  EXPECT_EQ(empirical_risk(model, s, Vector{1.0}), 0.0);
}

TEST(EmpiricalRisk, PinballHandEvaluated) {
  // Points 0 and 4 at theta = 2: (0-2)(0.5-1) = 1 and (4-2)(0.5-0) = 1.
  const auto model = ModelSpec::constant_quantile(0.5, -10, 10);
  const auto s = LabeledSample::labels_only({0, 4});
  double oracle = 0;
  for (double y : {0.0, 4.0}) oracle += (y - 2) * (0.5 - (y < 2 ? 1.0 : 0.0));
  oracle /= 2;
  EXPECT_DOUBLE_EQ(oracle, 1.0);
  EXPECT_DOUBLE_EQ(empirical_risk(model, s, Vector{2.0}), oracle);
}

TEST(EmpiricalRisk, NoFeaturesMeansConstantHypotheses) {
  const auto model = ModelSpec::l1_linear(1, 0);
  const auto s = LabeledSample::labels_only({1, -1, 2});
  EXPECT_DOUBLE_EQ(empirical_risk(model, s, Vector{}), 2.0);
}

TEST(EmpiricalRisk, OutsideParameterSpaceIsDomainError) {
  const auto model = ModelSpec::l1_linear(1, 2);
  const LabeledSample s(std::vector<Vector>{{1, 0}}, {1});
  EXPECT_THROW(empirical_risk(model, s, Vector{1.0, 0.5}), DomainError);
  EXPECT_NO_THROW(empirical_risk(model, s, Vector{0.5, -0.5 - 5e-10}));
  EXPECT_THROW(empirical_risk(ModelSpec::bernoulli_mode(), LabeledSample::labels_only({1}), Vector{0.5}),
               DomainError);
}

TEST(EmpiricalRisk, SampleModelMismatchIsConfigurationError) {
  const auto model = ModelSpec::l1_linear(1, 2);
  const LabeledSample s(std::vector<Vector>{{1}}, {1});
  EXPECT_THROW(empirical_risk(model, s, Vector{0.0, 0.0}), ConfigurationError);
  EXPECT_THROW(empirical_risk(ModelSpec::bernoulli_mode(), LabeledSample::labels_only({2}), Vector{0.0}),
               ConfigurationError);
}

TEST(ModelSpecValidation, RejectsBadPairings) {
  EXPECT_THROW(ModelSpec(Family::bernoulli_mode, Loss::squared(), ParamSpace::finite({{0.0}, {1.0}})),
               ConfigurationError);
  EXPECT_THROW(ModelSpec(Family::l1_linear, Loss::absolute(), ParamSpace::l1_ball(1, 1)), ConfigurationError);
  EXPECT_THROW(ModelSpec::constant_quantile(0.0, 0, 1), ConfigurationError);
  EXPECT_THROW(ModelSpec::constant_quantile(1.0, 0, 1), ConfigurationError);
  EXPECT_THROW(ModelSpec(Family::l1_linear, Loss::squared(), ParamSpace::interval({0}, {1})), ConfigurationError);
}

TEST(ParamSpaceValidation, RejectsDegenerateSpaces) {
  EXPECT_THROW(ParamSpace::finite({}), ConfigurationError);
  EXPECT_THROW(ParamSpace::interval({1}, {0}), ConfigurationError);
  EXPECT_THROW(ParamSpace::l1_ball(0, 2), ConfigurationError);
  EXPECT_THROW(ParamRegion::l1_ball(-1), ConfigurationError);
  EXPECT_NO_THROW(ParamRegion::l1_ball(0));
}

TEST(ParamRegion, ComplementAndUnionMembership) {
  const auto ball = ParamRegion::l1_ball(1);
  const auto outside = ParamRegion::complement(ball);
  EXPECT_TRUE(ball.contains(Vector{0.5, 0.5}));
  EXPECT_FALSE(outside.contains(Vector{0.5, 0.5}));
  EXPECT_TRUE(outside.contains(Vector{2, 0}));
  const auto u = ParamRegion::union_of({ParamRegion::finite({{3, 3}}), ball});
  EXPECT_TRUE(u.contains(Vector{3, 3}));
  EXPECT_FALSE(u.contains(Vector{3, 2}));
}

TEST(LabeledSample, Invariants) {
  EXPECT_THROW(LabeledSample::labels_only({}), ConfigurationError);
  EXPECT_THROW(LabeledSample(std::vector<Vector>{{1}, {1, 2}}, {1, 2}), ConfigurationError);
  EXPECT_THROW(LabeledSample(std::vector<Vector>{{1}}, {1, 2}), ConfigurationError);
  const LabeledSample s(std::vector<Vector>{{1, 2}, {3, 4}}, {5, 6});
  EXPECT_EQ(s.dim(), 2u);
  EXPECT_EQ(s.x(1)[0], 3.0);
}

TEST(SampleCsv, ParsesHeaderAndRows) {
  std::istringstream in("x_1,x_2,y\n1,2,3\n4, 5 ,6\n\n");
  const auto s = parse_sample_csv(in);
  EXPECT_EQ(s.size(), 2u);
  EXPECT_EQ(s.dim(), 2u);
  EXPECT_EQ(s.x(1)[1], 5.0);
  EXPECT_EQ(s.y(1), 6.0);
  std::istringstream labels_only("y\n0\n1\n");
  EXPECT_EQ(parse_sample_csv(labels_only).dim(), 0u);
}

TEST(SampleCsv, RejectsMalformedInput) {
  std::istringstream bad_header("a,y\n1,2\n");
  EXPECT_THROW(parse_sample_csv(bad_header), ConfigurationError);
  std::istringstream bad_cell("x_1,y\n1,zz\n");
  EXPECT_THROW(parse_sample_csv(bad_cell), ConfigurationError);
  std::istringstream short_row("x_1,y\n1\n");
  EXPECT_THROW(parse_sample_csv(short_row), ConfigurationError);
  std::istringstream empty("y\n");
  EXPECT_THROW(parse_sample_csv(empty), ConfigurationError);
}

TEST(Resample, DrawsRowsOfTheSource) {
  const LabeledSample src(std::vector<Vector>{{1}, {2}, {3}}, {10, 20, 30});
  LabeledSample out = src;
  Stream s(42);
  out.resample_from(src, s);
  ASSERT_EQ(out.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_DOUBLE_EQ(out.y(i), 10 * out.x(i)[0]);
}
