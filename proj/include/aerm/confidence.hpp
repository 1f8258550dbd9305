#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <span>
#include <utility>

#include "aerm/erm.hpp"
#include "aerm/error.hpp"
#include "aerm/model.hpp"
#include "aerm/sample.hpp"
#include "aerm/ucf.hpp"

namespace aerm {

/// The set of eps-almost empirical risk minimizers of one sample, as a
/// decision procedure. Every comparison carries kTolOpt on the inclusive
/// side, so optimizer error can only enlarge the set.
class AermSet {
public:
  AermSet(std::shared_ptr<const RiskSurface> surface, double eps) : surface_(std::move(surface)), eps_(eps) {
    if (!(eps_ >= 0)) throw ConfigurationError("eps must be nonnegative");
  }

  AermSet(const ModelSpec& model, const LabeledSample& sample, double eps)
      : AermSet(std::make_shared<const RiskSurface>(model, sample), eps) {}

  double eps() const noexcept { return eps_; }
  double min_risk() const noexcept { return surface_->min_risk(); }
  const RiskSurface& surface() const noexcept { return *surface_; }
  double level() const noexcept { return surface_->min_risk() + eps_ + kTolOpt; }

  bool contains(std::span<const double> theta) const { return surface_->value(theta) <= level(); }
  bool intersects(const ParamRegion& region) const { return surface_->min_over(region) <= level(); }
  bool superset(const ParamRegion& region) const { return surface_->max_over(region) <= level(); }

private:
  std::shared_ptr<const RiskSurface> surface_;
  double eps_;
};

inline bool aerm_contains(const AermSet& s, std::span<const double> theta) { return s.contains(theta); }
inline bool aerm_intersects(const AermSet& s, const ParamRegion& region) { return s.intersects(region); }
inline bool aerm_superset(const AermSet& s, const ParamRegion& region) { return s.superset(region); }

/// What the confidence set is meant to cover: the risk minimizer itself, or
/// the delta-neighborhood of minimal risk.
struct Target {
  enum class Kind { point_minimizer, neighborhood } kind = Kind::point_minimizer;
  double delta = 0;

  static Target point_minimizer() { return {}; }
  static Target neighborhood(double delta) {
    if (!(delta >= 0)) throw ConfigurationError("neighborhood delta must be nonnegative");
    return {Kind::neighborhood, delta};
  }
};

struct ConfidenceSetReport {
  double eps = 0;
  double alpha = 0;
  std::uint64_t m = 0;
  UcfSpec ucf;
  Target target;
  // Sample-size premise m >= f((eps - delta) / 2, alpha). For the exact
  // binomial function the premise is checked at m itself and the worst-case
  // coverage there is recorded instead.
  std::uint64_t required_m = 0;
  double premise_coverage = 0;
};

/// Almost-minimizer set at the tolerance that makes it a 1 - alpha confidence
/// set for the target.
inline std::pair<AermSet, ConfidenceSetReport> confidence_set(const ModelSpec& model, const LabeledSample& sample,
                                                              const UcfSpec& ucf, double alpha,
                                                              Target target = Target::point_minimizer()) {
  detail::check_level(alpha);
  const std::uint64_t m = sample.size();
  const double base = validity_tolerance(ucf, m, alpha);
  // inf{eps >= delta : m >= f((eps - delta) / 2, alpha)} = delta + base.
  const double delta = target.kind == Target::Kind::neighborhood ? target.delta : 0.0;
  const double eps = delta + base;
  if (!std::isfinite(eps)) {
    throw InfeasibleError("no finite tolerance satisfies the sample-size premise", required_m(ucf, 1.0, alpha));
  }
  ConfidenceSetReport report{eps, alpha, m, ucf, target, 0, 0};
  const double half = (eps - delta) / 2;
  if (ucf.kind == UcfSpec::Kind::bernoulli_exact) {
    report.required_m = m;
    report.premise_coverage = bernoulli_exact_worst_coverage(m, half);
    if (report.premise_coverage < 1 - alpha) {
      throw InfeasibleError("exact binomial coverage premise fails", required_m(ucf, half, alpha));
    }
  } else {
    report.required_m = required_m(ucf, half, alpha);
    report.premise_coverage = 1 - alpha;
  }
  return {AermSet(model, sample, eps), report};
}

namespace detail {
// Smallest level the confidence assignment probes.
inline constexpr double kAlphaFloor = 1e-12;
}  // namespace detail

/// Largest alpha at which the almost-minimizer set at tolerance
/// validity_tolerance(ucf, m, alpha) still contains the whole region; 0 when
/// it never does. The tolerance shrinks as alpha grows, so bisect.
inline double aerm_coverage_boundary(const ModelSpec& model, const LabeledSample& sample, const UcfSpec& ucf,
                                     const ParamRegion& region) {
  const RiskSurface surface(model, sample);
  const double excess = surface.max_over(region) - surface.min_risk();
  const std::uint64_t m = sample.size();
  auto covered = [&](double alpha) { return excess <= validity_tolerance(ucf, m, alpha) + kTolOpt; };
  if (!covered(detail::kAlphaFloor)) return 0.0;
  double lo = detail::kAlphaFloor;
  double hi = 1.0;
  if (covered(1.0 - 1e-12)) return 1.0 - 1e-12;
  while (hi - lo > 1e-13) {
    const double mid = 0.5 * (lo + hi);
    if (covered(mid)) lo = mid; else hi = mid;
  }
  return lo;
}

/// sup{1 - alpha : the set at tolerance validity_tolerance(ucf, m, alpha)
/// contains the region}. Tolerances grow without bound as alpha -> 0, so the
/// value is 1 whenever the region is covered at the smallest probed level and
/// 0 otherwise; aerm_coverage_boundary gives the level where coverage starts.
inline double conf_of_region_aerm(const ModelSpec& model, const LabeledSample& sample, const UcfSpec& ucf,
                                  const ParamRegion& region) {
  return aerm_coverage_boundary(model, sample, ucf, region) > 0 ? 1.0 : 0.0;
}

}  // namespace aerm
