#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "aerm/confidence.hpp"
#include "aerm/erm.hpp"
#include "aerm/error.hpp"
#include "aerm/generators.hpp"
#include "aerm/model.hpp"
#include "aerm/parallel.hpp"
#include "aerm/rng.hpp"
#include "aerm/sample.hpp"
#include "aerm/ucf.hpp"

namespace aerm {

enum class Method { bootstrap, monte_carlo };

inline std::string to_string(Method m) { return m == Method::bootstrap ? "bootstrap" : "monte-carlo"; }

struct PlausibilityEstimate {
  double value = 0;
  double eps = 0;
  std::uint64_t replicates = 0;
  std::uint64_t skipped_empty = 0;
  Method method = Method::bootstrap;
  std::uint64_t seed = 0;
};

/// Per-replicate critical excess: region_min - min_risk on each replicate
/// sample, one row per replicate and one column per region. The region meets
/// the eps-almost minimizer set exactly when the excess is <= eps + kTolOpt.
/// Replicate r uses the stream derive_key(seed, r), so the table does not
/// depend on the worker count.
struct ExcessTable {
  std::size_t regions = 0;
  std::vector<double> excess;  // row-major, replicates x regions

  std::size_t replicates() const noexcept { return regions == 0 ? 0 : excess.size() / regions; }
  double at(std::size_t r, std::size_t k) const noexcept { return excess[r * regions + k]; }

  /// Fraction of replicates whose set at tolerance eps meets region k.
  double plausibility(std::size_t k, double eps) const {
    std::uint64_t hits = 0;
    const std::size_t n = replicates();
    for (std::size_t r = 0; r < n; ++r) hits += at(r, k) <= eps + kTolOpt;
    return static_cast<double>(hits) / static_cast<double>(n);
  }
};

namespace detail {

template <class Draw>
ExcessTable excess_table(const ModelSpec& model, const std::vector<ParamRegion>& regions, std::uint64_t replicates,
                         std::uint64_t seed, unsigned threads, Draw&& draw) {
  if (replicates < 1) throw ConfigurationError("replicate count must be at least 1");
  if (regions.empty()) throw ConfigurationError("at least one region is required");
  ExcessTable table;
  table.regions = regions.size();
  table.excess.assign(static_cast<std::size_t>(replicates) * regions.size(), 0.0);
  parallel_blocks(static_cast<std::size_t>(replicates), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t r = begin; r < end; ++r) {
      Stream stream(derive_key(seed, r));
      const LabeledSample s = draw(stream);
      const RiskSurface surface(model, s);
      for (std::size_t k = 0; k < regions.size(); ++k) {
        table.excess[r * regions.size() + k] = surface.min_over(regions[k]) - surface.min_risk();
      }
    }
  });
  return table;
}

}  // namespace detail

/// Excess table over bootstrap resamples (size m, with replacement).
/// threads == 0 uses worker_count().
inline ExcessTable bootstrap_excess(const ModelSpec& model, const LabeledSample& sample,
                                    const std::vector<ParamRegion>& regions, std::uint64_t B, std::uint64_t seed,
                                    unsigned threads = 0) {
  model.check_sample(sample);
  return detail::excess_table(model, regions, B, seed, threads, [&](Stream& s) {
    LabeledSample out = sample;
    out.resample_from(sample, s);
    return out;
  });
}

/// Excess table over fresh samples from the generator.
inline ExcessTable monte_carlo_excess(const GeneratorSpec& gen, const ModelSpec& model,
                                      const std::vector<ParamRegion>& regions, std::uint64_t replicates,
                                      std::uint64_t seed, unsigned threads = 0) {
  return detail::excess_table(model, regions, replicates, seed, threads, [&](Stream& s) { return gen.draw(s); });
}

namespace detail {

inline void check_eps_nonneg(double eps) {
  if (!(eps >= 0)) throw ConfigurationError("eps must be nonnegative");
}

}  // namespace detail

/// Estimate from column k of an excess table. The almost-minimizer set of
/// every supported family contains the empirical minimizer, so no replicate
/// is ever excluded for emptiness.
inline PlausibilityEstimate plausibility_from_excess(const ExcessTable& table, std::size_t k, double eps,
                                                     Method method, std::uint64_t seed) {
  detail::check_eps_nonneg(eps);
  if (table.replicates() == 0) throw UndefinedPlausibilityError("no replicate has a nonempty almost-minimizer set");
  return {table.plausibility(k, eps), eps, table.replicates(), 0, method, seed};
}

/// Fraction of bootstrap resamples whose eps-almost minimizer set meets the
/// region.
inline PlausibilityEstimate bootstrap_plausibility(const ModelSpec& model, const LabeledSample& sample, double eps,
                                                   const ParamRegion& region, std::uint64_t B, std::uint64_t seed,
                                                   unsigned threads = 0) {
  detail::check_eps_nonneg(eps);
  return plausibility_from_excess(bootstrap_excess(model, sample, {region}, B, seed, threads), 0, eps,
                                  Method::bootstrap, seed);
}

/// Fraction of fresh generator samples whose eps-almost minimizer set meets
/// the region.
inline PlausibilityEstimate mc_plausibility(const GeneratorSpec& gen, const ModelSpec& model, double eps,
                                            const ParamRegion& region, std::uint64_t replicates, std::uint64_t seed) {
  detail::check_eps_nonneg(eps);
  return plausibility_from_excess(monte_carlo_excess(gen, model, {region}, replicates, seed), 0, eps,
                                  Method::monte_carlo, seed);
}

/// Fraction of bootstrap resamples whose eps-almost minimizer set lies inside
/// the region. On a finite parameter space the set is enumerated; otherwise
/// containment is decided as "misses the closed complement".
inline PlausibilityEstimate bootstrap_belief(const ModelSpec& model, const LabeledSample& sample, double eps,
                                             const ParamRegion& region, std::uint64_t B, std::uint64_t seed) {
  detail::check_eps_nonneg(eps);
  model.check_sample(sample);
  if (B < 1) throw ConfigurationError("replicate count must be at least 1");
  std::vector<std::uint8_t> inside(static_cast<std::size_t>(B), 0);
  const ParamRegion outside = ParamRegion::complement(region);
  parallel_blocks(inside.size(), 0, [&](std::size_t begin, std::size_t end) {
    LabeledSample s = sample;
    for (std::size_t r = begin; r < end; ++r) {
      Stream stream(derive_key(seed, r));
      s.resample_from(sample, stream);
      const auto surface = std::make_shared<const RiskSurface>(model, s);
      const AermSet set(surface, eps);
      bool all_in = true;
      if (model.space().kind() == ParamSpace::Kind::finite) {
        surface->for_each_point([&](const Vector& theta, double risk) {
          if (risk <= set.level() && !region.contains(theta)) all_in = false;
        });
      } else {
        try {
          all_in = !set.intersects(outside);
        } catch (const EmptyRegionError&) {
          all_in = true;
        }
      }
      inside[r] = all_in;
    }
  });
  const auto hits = static_cast<double>(std::count(inside.begin(), inside.end(), 1));
  return {hits / static_cast<double>(B), eps, B, 0, Method::bootstrap, seed};
}

/// Smallest B with B >= (4 gamma + 3) ln(1 / gamma) / (6 gamma^2).
inline std::uint64_t bernstein_min_B(double gamma) {
  if (!(gamma > 0 && gamma < 1)) throw ConfigurationError("gamma must lie in (0, 1)");
  return detail::ceil_count((4 * gamma + 3) * std::log(1 / gamma) / (6 * gamma * gamma));
}

/// alpha + exp(-6 B gamma^2 / (4 gamma + 3)). Not clamped to 1.
inline double type1_bound(double alpha, double gamma, std::uint64_t B) {
  return alpha + std::exp(-6.0 * static_cast<double>(B) * gamma * gamma / (4 * gamma + 3));
}

struct Type1Optimum {
  double alpha = 0;
  double gamma = 0;
  double bound = 0;
};

/// Minimizes the tolerance-first type-I bound over 0 < gamma < alpha < 1. The
/// bound increases in alpha, so for each gamma on the 1e-4 grid the best
/// alpha sits on the boundary, taken as gamma + 1e-9.
inline Type1Optimum optimal_type1_bound(std::uint64_t B) {
  if (B < 1) throw ConfigurationError("B must be at least 1");
  constexpr double kOffset = 1e-9;
  Type1Optimum best{0, 0, std::numeric_limits<double>::infinity()};
  for (int k = 1; k < 10000; ++k) {
    const double gamma = k * 1e-4;
    const double alpha = gamma + kOffset;
    if (alpha >= 1) break;
    const double bound = type1_bound(alpha, gamma, B);
    if (bound < best.bound) best = {alpha, gamma, bound};
  }
  return best;
}

struct TestConfig {
  enum class Mode { level_first, tolerance_first };
  double alpha = 0.05;
  double gamma = 0.025;
  std::uint64_t B = 0;
  Mode mode = Mode::level_first;
  ParamRegion region = ParamRegion::finite({});
  UcfSpec ucf;

  void validate() const {
    if (!(gamma > 0 && gamma < alpha && alpha < 1)) {
      throw ConfigurationError("test levels need 0 < gamma < alpha < 1");
    }
    if (B < 1) throw ConfigurationError("B must be at least 1");
  }
};

inline std::string to_string(TestConfig::Mode m) {
  return m == TestConfig::Mode::level_first ? "level-first" : "tolerance-first";
}

struct TestResult {
  PlausibilityEstimate plausibility;
  double threshold = 0;
  bool reject = false;
  double type1_bound = 0;
  double eps_used = 0;
};

/// Keeps the level alpha: tolerance at alpha - gamma, reject below 1 - alpha.
inline TestResult test_level_first(const ModelSpec& model, const LabeledSample& sample, const TestConfig& cfg,
                                   std::uint64_t seed) {
  cfg.validate();
  const std::uint64_t need = bernstein_min_B(cfg.gamma);
  if (cfg.B < need) {
    throw ConfigurationError("level-first test with gamma = " + std::to_string(cfg.gamma) + " needs B >= " +
                             std::to_string(need));
  }
  const double eps = validity_tolerance(cfg.ucf, sample.size(), cfg.alpha - cfg.gamma);
  TestResult r;
  r.plausibility = bootstrap_plausibility(model, sample, eps, cfg.region, cfg.B, seed);
  r.threshold = 1 - cfg.alpha;
  r.reject = r.plausibility.value < r.threshold;
  r.type1_bound = cfg.alpha;
  r.eps_used = eps;
  return r;
}

/// Keeps the tolerance at alpha: reject below 1 - alpha - gamma, with type-I
/// error at most alpha + exp(-6 B gamma^2 / (4 gamma + 3)).
inline TestResult test_tolerance_first(const ModelSpec& model, const LabeledSample& sample, const TestConfig& cfg,
                                       std::uint64_t seed) {
  cfg.validate();
  if (cfg.alpha + cfg.gamma >= 1) throw ConfigurationError("tolerance-first test needs alpha + gamma < 1");
  const double eps = validity_tolerance(cfg.ucf, sample.size(), cfg.alpha);
  TestResult r;
  r.plausibility = bootstrap_plausibility(model, sample, eps, cfg.region, cfg.B, seed);
  r.threshold = 1 - cfg.alpha - cfg.gamma;
  r.reject = r.plausibility.value < r.threshold;
  r.type1_bound = type1_bound(cfg.alpha, cfg.gamma, cfg.B);
  r.eps_used = eps;
  return r;
}

/// Confidence of region column k_region of a shared excess table; see
/// conf_of_region_boot.
inline double conf_from_excess(const ExcessTable& table, std::size_t k_region, const UcfSpec& ucf, std::uint64_t m) {
  std::vector<double> e(table.replicates());
  for (std::size_t r = 0; r < e.size(); ++r) e[r] = table.at(r, k_region);
  std::sort(e.begin(), e.end());
  const double n = static_cast<double>(e.size());
  for (std::size_t k = e.size(); k >= 1; --k) {
    const double alpha = std::max(1.0 - static_cast<double>(k) / n, detail::kAlphaFloor);
    if (e[k - 1] <= validity_tolerance(ucf, m, alpha) + kTolOpt) return static_cast<double>(k) / n;
  }
  return 0.0;
}


/// sup{1 - alpha : bootstrap plausibility at tolerance
/// validity_tolerance(ucf, m, alpha) is >= 1 - alpha}, on one set of
/// resamples. With sorted excesses e_(1) <= ... <= e_(B), the plausibility is
/// >= k/B exactly when e_(k) <= eps + kTolOpt, so the supremum is the largest
/// k/B with e_(k) <= validity_tolerance(ucf, m, 1 - k/B) + kTolOpt. The level
/// alpha = 0 of k = B is probed at a floor of 1e-12.
inline double conf_of_region_boot(const ModelSpec& model, const LabeledSample& sample, const UcfSpec& ucf,
                                  const ParamRegion& region, std::uint64_t B, std::uint64_t seed) {
  const ExcessTable table = bootstrap_excess(model, sample, {region}, B, seed);
  return conf_from_excess(table, 0, ucf, sample.size());
}

}  // namespace aerm
