#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <vector>

#include "aerm/plausibility.hpp"

using namespace aerm;

namespace {

const ModelSpec kBern = ModelSpec::bernoulli_mode();

LabeledSample labels(std::vector<double> y) { return LabeledSample::labels_only(std::move(y)); }

// Exact plausibility: every one of the m^m resamples weighted 1/m^m, each
// judged by brute force over Theta = {0, 1}.
double enumerated_bootstrap(const std::vector<double>& y, double eps, double region_point) {
  const std::size_t m = y.size();
  std::size_t total = 1;
  for (std::size_t i = 0; i < m; ++i) total *= m;
  std::size_t hits = 0;
  for (std::size_t code = 0; code < total; ++code) {
    std::size_t c = code;
    double ones = 0;
    for (std::size_t i = 0; i < m; ++i, c /= m) ones += y[c % m];
    const double r0 = ones / m, r1 = 1 - ones / m;
    const double rp = region_point == 0 ? r0 : r1;
    hits += rp <= std::min(r0, r1) + eps + 1e-9;
  }
  return static_cast<double>(hits) / static_cast<double>(total);
}

double mc_band(double v, double n) { return 3 * std::sqrt(v * (1 - v) / n) + 1e-12; }

}  // namespace

TEST(BootstrapPlausibility, WholeSpaceIsOne) {
  const auto r = bootstrap_plausibility(kBern, labels({0, 1, 1, 0, 1}), 0, ParamRegion::covering(kBern.space()), 500, 3);
  EXPECT_EQ(r.value, 1.0);
  EXPECT_EQ(r.replicates, 500u);
  EXPECT_EQ(r.skipped_empty, 0u);
  EXPECT_EQ(r.method, Method::bootstrap);
}

TEST(BootstrapPlausibility, AllOnesNeverMeetsZero) {
  EXPECT_EQ(bootstrap_plausibility(kBern, labels({1, 1, 1}), 0, ParamRegion::finite({{0.0}}), 400, 9).value, 0.0);
}

TEST(BootstrapPlausibility, TwoPointSampleTiesMatchEnumeration) {
  EXPECT_DOUBLE_EQ(enumerated_bootstrap({0, 1}, 0, 1), 0.75);
  const std::uint64_t B = 100000;
  const double v = bootstrap_plausibility(kBern, labels({0, 1}), 0, ParamRegion::finite({{1.0}}), B, 11).value;
  EXPECT_NEAR(v, 0.75, mc_band(0.75, B));
}

TEST(BootstrapPlausibility, MatchesEnumerationForSmallSamples) {
  const std::uint64_t B = 40000;
  const std::vector<std::vector<double>> ys = {{1}, {0, 0, 1}, {1, 0, 1, 1}, {0, 1, 1, 0, 1}};
  std::uint64_t seed = 100;
  for (const auto& y : ys) {
    for (double eps : {0.0, 0.2, 0.5}) {
      for (double point : {0.0, 1.0}) {
        const double exact = enumerated_bootstrap(y, eps, point);
        const double got =
            bootstrap_plausibility(kBern, labels(y), eps, ParamRegion::finite({{point}}), B, ++seed).value;
        EXPECT_NEAR(got, exact, mc_band(exact, B)) << "m=" << y.size() << " eps=" << eps << " point=" << point;
      }
    }
  }
}

TEST(BootstrapPlausibility, SameSeedSameValueAcrossThreadCounts) {
  const auto s = labels({0, 1, 1, 0, 1, 0, 0, 1, 1});
  const auto region = ParamRegion::finite({{0.0}});
  const auto a = bootstrap_plausibility(kBern, s, 0.1, region, 3000, 5, 1);
  const auto b = bootstrap_plausibility(kBern, s, 0.1, region, 3000, 5, 4);
  EXPECT_EQ(a.value, b.value);
  EXPECT_NE(a.value, bootstrap_plausibility(kBern, s, 0.1, region, 3000, 6, 1).value);
}

TEST(BootstrapPlausibility, RejectsBadArguments) {
  const auto s = labels({0, 1});
  EXPECT_THROW(bootstrap_plausibility(kBern, s, -0.1, ParamRegion::finite({{0.0}}), 10, 1), ConfigurationError);
  EXPECT_THROW(bootstrap_plausibility(kBern, s, 0, ParamRegion::finite({{0.0}}), 0, 1), ConfigurationError);
  EXPECT_THROW(bootstrap_plausibility(kBern, s, 0, ParamRegion::finite({{0.5}}), 10, 1), EmptyRegionError);
}

TEST(McPlausibility, Examples) {
  const auto one = ParamRegion::finite({{1.0}});
  const auto zero = ParamRegion::finite({{0.0}});
  EXPECT_EQ(mc_plausibility(GeneratorSpec::bernoulli(1.0, 20), kBern, 0, one, 200, 1).value, 1.0);
  EXPECT_EQ(mc_plausibility(GeneratorSpec::bernoulli(1.0, 20), kBern, 0, zero, 200, 1).value, 0.0);
  const auto r = mc_plausibility(GeneratorSpec::bernoulli(0.5, 1), kBern, 0, zero, 20000, 2);
  EXPECT_NEAR(r.value, 0.5, mc_band(0.5, 20000));
  EXPECT_EQ(r.method, Method::monte_carlo);
  // A point mass at label 1 through the quantile model.
  const auto q = ModelSpec::constant_quantile(0.5, 0, 2);
  EXPECT_EQ(mc_plausibility(GeneratorSpec::labeled_distribution(Law::point_mass(1), 5), q, 0,
                            ParamRegion::finite({{1.0}}), 50, 3)
                .value,
            1.0);
}

TEST(BootstrapBelief, DualOfPlausibilityOfComplement) {
  const auto s = labels({0, 1, 1, 0, 1});
  for (double eps : {0.0, 0.2, 1.0}) {
    const double bel = bootstrap_belief(kBern, s, eps, ParamRegion::finite({{1.0}}), 2000, 4).value;
    const double pl = bootstrap_plausibility(kBern, s, eps, ParamRegion::finite({{0.0}}), 2000, 4).value;
    EXPECT_DOUBLE_EQ(bel, 1 - pl);
  }
}

TEST(BernsteinMinB, Examples) {
  EXPECT_EQ(bernstein_min_B(0.025), 3050u);
  EXPECT_EQ(bernstein_min_B(0.05), 640u);
  EXPECT_EQ(bernstein_min_B(0.5), 3u);
  EXPECT_THROW(bernstein_min_B(0), ConfigurationError);
  EXPECT_THROW(bernstein_min_B(1), ConfigurationError);
}

TEST(TestLevelFirst, Examples) {
  TestConfig cfg;
  cfg.alpha = 0.05;
  cfg.gamma = 0.025;
  cfg.B = 3050;
  cfg.ucf = UcfSpec::chebyshev_variance(0.25);
  cfg.region = ParamRegion::covering(kBern.space());
  const auto s = labels(std::vector<double>(40, 1.0));
  const auto all = test_level_first(kBern, s, cfg, 1);
  EXPECT_FALSE(all.reject);
  EXPECT_EQ(all.threshold, 0.95);
  EXPECT_EQ(all.type1_bound, 0.05);
  EXPECT_DOUBLE_EQ(all.eps_used, validity_tolerance(cfg.ucf, 40, 0.025));

  cfg.region = ParamRegion::finite({{0.0}});
  cfg.ucf = UcfSpec::chebyshev_variance(0.0);  // tolerance 0
  const auto zero = test_level_first(kBern, s, cfg, 1);
  EXPECT_EQ(zero.plausibility.value, 0.0);
  EXPECT_TRUE(zero.reject);

  cfg.B = 3000;
  try {
    test_level_first(kBern, s, cfg, 1);
    FAIL() << "expected a configuration error";
  } catch (const ConfigurationError& e) {
    EXPECT_NE(std::string(e.what()).find("3050"), std::string::npos);
  }
}

TEST(TestToleranceFirst, Examples) {
  TestConfig cfg;
  cfg.mode = TestConfig::Mode::tolerance_first;
  cfg.alpha = 0.05;
  cfg.gamma = 0.025;
  cfg.B = 3050;
  cfg.ucf = UcfSpec::chebyshev_variance(0.25);
  cfg.region = ParamRegion::finite({{1.0}});
  const auto s = labels({1, 1, 0, 1, 1, 1, 0, 1});
  const auto r = test_tolerance_first(kBern, s, cfg, 2);
  EXPECT_DOUBLE_EQ(r.threshold, 1 - 0.05 - 0.025);
  EXPECT_DOUBLE_EQ(r.eps_used, validity_tolerance(cfg.ucf, 8, 0.05));
  EXPECT_DOUBLE_EQ(r.type1_bound, 0.05 + std::exp(-6 * 3050 * 0.025 * 0.025 / 3.1));
  EXPECT_LE(r.type1_bound, 0.075);
  EXPECT_EQ(r.reject, r.plausibility.value < r.threshold);

  cfg.alpha = 0.6;
  cfg.gamma = 0.5;
  EXPECT_THROW(test_tolerance_first(kBern, s, cfg, 2), ConfigurationError);
}

TEST(TypeOneBound, SmallGammaLeavesNoGuarantee) {
  EXPECT_NEAR(type1_bound(0.05, 1e-6, 50), 1.05, 1e-6);
  EXPECT_GT(type1_bound(0.05, 1e-6, 50), 1.0);
}

TEST(OptimalTypeOneBound, Examples) {
  const auto o = optimal_type1_bound(50);
  EXPECT_NEAR(o.bound, 0.242, 0.005);
  EXPECT_GT(o.alpha, o.gamma);
  EXPECT_NEAR(o.alpha - o.gamma, 1e-9, 1e-12);
  // The continuous optimum: d/dg [g + exp(-300 g^2 / (4 g + 3))] = 0 near 0.207.
  EXPECT_NEAR(o.gamma, 0.2073, 5e-4);
  EXPECT_LT(optimal_type1_bound(100000).bound, 0.01);
  EXPECT_THROW(optimal_type1_bound(0), ConfigurationError);
}

TEST(OptimalTypeOneBound, NeuralNetTestArithmetic) {
  // Tolerance-first test at the optimizing levels: threshold 1 - alpha - gamma.
  const auto o = optimal_type1_bound(50);
  const double threshold = 1 - o.alpha - o.gamma;
  EXPECT_NEAR(threshold, 0.585, 0.005);
  EXPECT_LT(0.400, threshold);
}

TEST(ConfFromExcess, MatchesBruteForceLevelSearch) {
  ExcessTable table;
  table.regions = 1;
  table.excess = {0.0, 0.05, 0.3, 0.12, 0.9, 0.2, 0.07, 0.01, 0.5, 0.16};
  const auto u = UcfSpec::lasso_exponential(0.2);
  const std::uint64_t m = 50;
  // sup{1 - alpha : pl(eps(alpha)) >= 1 - alpha} over a fine alpha grid.
  double brute = 0;
  for (int k = 1; k < 1000000; ++k) {
    const double alpha = k * 1e-6;
    if (table.plausibility(0, validity_tolerance(u, m, alpha)) >= 1 - alpha) brute = std::max(brute, 1 - alpha);
  }
  const double conf = conf_from_excess(table, 0, u, m);
  EXPECT_GE(conf + 1e-12, brute);
  EXPECT_NEAR(conf, brute, 2e-6);
  EXPECT_DOUBLE_EQ(conf, 0.2);
}

TEST(ConfOfRegionBoot, Examples) {
  const auto s = labels({1, 1, 0, 1, 0});
  const auto u = UcfSpec::chebyshev_variance(0.01);
  EXPECT_EQ(conf_of_region_boot(kBern, s, u, ParamRegion::covering(kBern.space()), 300, 1), 1.0);
  EXPECT_EQ(conf_of_region_boot(kBern, labels({1, 1, 1}), UcfSpec::chebyshev_variance(0), ParamRegion::finite({{0.0}}),
                                300, 1),
            0.0);
}

TEST(ConfOfRegionBoot, SixtyPercentOnesMatchesEnumeration) {
  // Exact conf: the largest attained plausibility value v with
  // pl(eps(1 - v)) >= v, plausibility computed over all 5^5 resamples. The
  // lasso-exponential function keeps the tolerance below the largest excess
  // even at tiny alpha, so the answer is not trivially 1.
  const std::vector<double> y = {1, 1, 0, 1, 0};
  const auto u = UcfSpec::lasso_exponential(0.1);
  const std::uint64_t m = y.size();
  auto exact_pl = [&](double alpha) { return enumerated_bootstrap(y, validity_tolerance(u, m, alpha), 1.0); };
  double exact = 0;
  for (int k = 0; k <= 1200; ++k) {
    const double v = exact_pl(std::pow(10.0, -12 + k / 100.0) * (1 - 1e-9));
    if (exact_pl(std::max(1 - v, 1e-12)) >= v) exact = std::max(exact, v);
  }
  // Resamples with at least three ones.
  EXPECT_NEAR(exact, 10 * 0.216 * 0.16 + 5 * 0.1296 * 0.4 + 0.07776, 1e-12);
  const std::uint64_t B = 200000;
  const double got = conf_of_region_boot(kBern, labels(y), u, ParamRegion::finite({{1.0}}), B, 21);
  EXPECT_NEAR(got, exact, mc_band(exact, B) + 1.0 / B);
}
