#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "aerm/confidence.hpp"
#include "aerm/error.hpp"
#include "aerm/generators.hpp"
#include "aerm/model.hpp"
#include "aerm/parallel.hpp"
#include "aerm/plausibility.hpp"
#include "aerm/rng.hpp"
#include "aerm/ucf.hpp"

namespace aerm {

// ---- plausibility of {beta : ||beta||_1 <= t'} along a grid of t' ----------

struct LassoCurveConfig {
  std::size_t p = 10;
  double t = 10;
  std::uint64_t m = 1000;
  double alpha = 0.05;
  std::uint64_t replicates = 1000;
  std::vector<double> grid;  // t' values; empty means 0, 0.1, ..., t
  std::optional<Vector> beta0;  // drawn from Unif(-1,1)^p when absent
  // Scale c of the lasso-exponential function: ||beta0|| + 1 in this norm.
  enum class Norm { l2, l1 } norm = Norm::l2;
  // Tolerance: coverage_tolerance (eps) or validity_tolerance (2 eps).
  enum class Tolerance { coverage, validity } tolerance = Tolerance::coverage;
  std::uint64_t seed = 1;
};

struct LassoCurveRow {
  double t_prime;
  double plausibility;
  double mc_error;
};

struct LassoCurve {
  Vector beta0;
  double beta0_l1 = 0;
  double c = 0;
  double eps = 0;
  std::vector<LassoCurveRow> rows;
  std::optional<double> crossing;  // smallest t' with plausibility >= 1 - alpha
};

inline Vector draw_beta0(std::size_t p, std::uint64_t seed) {
  Stream s(derive_key(seed, 0));
  Vector b(p);
  for (auto& v : b) v = s.uniform(-1.0, 1.0);
  return b;
}

inline LassoCurve run_lasso_plaus_curve(const LassoCurveConfig& cfg) {
  detail::check_level(cfg.alpha);
  LassoCurve out;
  out.beta0 = cfg.beta0 ? *cfg.beta0 : draw_beta0(cfg.p, cfg.seed);
  if (out.beta0.size() != cfg.p) throw ConfigurationError("beta0 length does not match p");
  out.beta0_l1 = l1_norm(out.beta0);
  double l2 = 0;
  for (double b : out.beta0) l2 += b * b;
  out.c = (cfg.norm == LassoCurveConfig::Norm::l2 ? std::sqrt(l2) : out.beta0_l1) + 1;
  const UcfSpec ucf = UcfSpec::lasso_exponential(out.c);
  out.eps = cfg.tolerance == LassoCurveConfig::Tolerance::coverage ? coverage_tolerance(ucf, cfg.m, cfg.alpha)
                                                                   : validity_tolerance(ucf, cfg.m, cfg.alpha);
  std::vector<double> grid = cfg.grid;
  if (grid.empty()) {
    const int steps = static_cast<int>(std::lround(cfg.t * 10));
    for (int k = 0; k <= steps; ++k) grid.push_back(std::min(cfg.t, k / 10.0));
  }
  std::vector<ParamRegion> regions;
  for (double tp : grid) regions.push_back(ParamRegion::l1_ball(tp));
  const ModelSpec model = ModelSpec::l1_linear(cfg.t, cfg.p);
  const GeneratorSpec gen = GeneratorSpec::lasso_linear(out.beta0, cfg.m);
  // One set of samples for every t' (common random numbers).
  const ExcessTable table = monte_carlo_excess(gen, model, regions, cfg.replicates, derive_key(cfg.seed, 1));
  const double n = static_cast<double>(cfg.replicates);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double pl = table.plausibility(k, out.eps);
    out.rows.push_back({grid[k], pl, std::sqrt(pl * (1 - pl) / n)});
    if (pl >= 1 - cfg.alpha && (!out.crossing || grid[k] < *out.crossing)) out.crossing = grid[k];
  }
  return out;
}

// ---- coverage of the bootstrap test for {0} under Bernoulli(p) --------------

struct BernoulliCoverageConfig {
  double p = 0.45;
  double alpha = 0.05;
  double gamma = 0.025;
  std::uint64_t B = 0;  // 0 means bernstein_min_B(gamma)
  std::uint64_t trials = 200;
  std::vector<std::uint64_t> grid;  // sample sizes; empty means multiples of m*
  std::uint64_t seed = 1;
};

struct BernoulliCoverageRow {
  std::uint64_t m;
  double eps;
  double frequency;
  double mc_error;
};

struct BernoulliCoverage {
  std::uint64_t m_star = 0;
  std::uint64_t B = 0;
  std::vector<BernoulliCoverageRow> rows;
};

/// Sample size from which the exact binomial function guarantees
/// validity_tolerance(m, alpha - gamma) <= 1 - 2p, the risk gap between the
/// two hypotheses.
inline std::uint64_t bernoulli_coverage_threshold(double p, double alpha, double gamma) {
  const double gap = std::abs(1 - 2 * p);
  if (!(gap > 0)) throw ConfigurationError("p = 1/2 has no risk gap");
  return required_m(UcfSpec::bernoulli_exact(), gap / 2, alpha - gamma);
}

inline BernoulliCoverage run_bernoulli_coverage(const BernoulliCoverageConfig& cfg) {
  if (!(cfg.gamma > 0 && cfg.gamma < cfg.alpha && cfg.alpha < 1)) {
    throw ConfigurationError("bernoulli-coverage needs 0 < gamma < alpha < 1");
  }
  if (!(cfg.p >= 0 && cfg.p < 0.5)) throw ConfigurationError("bernoulli-coverage needs 0 <= p < 1/2");
  if (cfg.trials < 1) throw ConfigurationError("trials must be at least 1");
  BernoulliCoverage out;
  out.B = cfg.B == 0 ? bernstein_min_B(cfg.gamma) : cfg.B;
  out.m_star = cfg.p == 0 ? 1 : bernoulli_coverage_threshold(cfg.p, cfg.alpha, cfg.gamma);
  std::vector<std::uint64_t> grid = cfg.grid;
  if (grid.empty()) {
    const auto ms = out.m_star;
    grid = {std::max<std::uint64_t>(1, ms / 4), std::max<std::uint64_t>(1, ms / 2), ms, ms + ms / 2, 2 * ms, 4 * ms};
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  }
  const ModelSpec model = ModelSpec::bernoulli_mode();
  const ParamRegion zero = ParamRegion::finite({{0.0}});
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const std::uint64_t m = grid[g];
    const double eps = validity_tolerance(UcfSpec::bernoulli_exact(), m, cfg.alpha - cfg.gamma);
    const GeneratorSpec gen = GeneratorSpec::bernoulli(cfg.p, m);
    std::vector<std::uint8_t> hit(static_cast<std::size_t>(cfg.trials), 0);
    const std::uint64_t grid_key = derive_key(cfg.seed, g);
    parallel_blocks(hit.size(), 0, [&](std::size_t begin, std::size_t end) {
      for (std::size_t trial = begin; trial < end; ++trial) {
        const std::uint64_t trial_key = derive_key(grid_key, trial);
        Stream s(derive_key(trial_key, 0));
        const LabeledSample sample = gen.draw(s);
        const auto pl = bootstrap_plausibility(model, sample, eps, zero, out.B, derive_key(trial_key, 1), 1);
        hit[trial] = pl.value >= 1 - cfg.alpha;
      }
    });
    const double n = static_cast<double>(cfg.trials);
    const double freq = static_cast<double>(std::count(hit.begin(), hit.end(), 1)) / n;
    out.rows.push_back({m, eps, freq, std::sqrt(freq * (1 - freq) / n)});
  }
  return out;
}

// ---- confidence set for a quantile ------------------------------------------

struct QuantileDemoConfig {
  Law law = Law::uniform(0, 1);
  double tau = 0.5;
  double lo = 0;
  double hi = 1;
  std::uint64_t m = 500;
  double alpha = 0.05;
  std::uint64_t trials = 200;
  std::optional<double> v_sup;  // computed from the law when absent
  std::uint64_t seed = 1;
};

struct QuantileDemo {
  double true_quantile = 0;
  double v_sup = 0;
  double eps = 0;
  double coverage = 0;
  std::uint64_t trials = 0;
};

inline QuantileDemo run_quantile_demo(const QuantileDemoConfig& cfg) {
  detail::check_level(cfg.alpha);
  if (cfg.trials < 1) throw ConfigurationError("trials must be at least 1");
  const ModelSpec model = ModelSpec::constant_quantile(cfg.tau, cfg.lo, cfg.hi);
  const GeneratorSpec gen = GeneratorSpec::labeled_distribution(cfg.law, cfg.m);
  QuantileDemo out;
  out.trials = cfg.trials;
  out.true_quantile = true_risk_minimizer(gen, model).points.front()[0];
  out.v_sup = cfg.v_sup ? *cfg.v_sup : quantile_v_sup(cfg.law, cfg.tau, cfg.lo, cfg.hi);
  const UcfSpec ucf = UcfSpec::quantile_variance(cfg.tau, out.v_sup);
  out.eps = validity_tolerance(ucf, cfg.m, cfg.alpha);
  std::vector<std::uint8_t> covered(static_cast<std::size_t>(cfg.trials), 0);
  const Vector theta0{out.true_quantile};
  parallel_blocks(covered.size(), 0, [&](std::size_t begin, std::size_t end) {
    for (std::size_t trial = begin; trial < end; ++trial) {
      Stream s(derive_key(cfg.seed, trial));
      const AermSet set(model, gen.draw(s), out.eps);
      covered[trial] = set.contains(theta0);
    }
  });
  out.coverage =
      static_cast<double>(std::count(covered.begin(), covered.end(), 1)) / static_cast<double>(cfg.trials);
  return out;
}

}  // namespace aerm
