#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "aerm/error.hpp"
#include "aerm/sample.hpp"

namespace aerm {

/// Absolute tolerance for membership tests (ball norms, box faces, points).
inline constexpr double kMembershipTol = 1e-9;

/// Optimizer accuracy: every reported minimum is within this of the infimum.
inline constexpr double kTolOpt = 1e-9;

enum class Family { bernoulli_mode, l1_linear, constant_quantile };
enum class LossKind { zero_one, squared, pinball, absolute };

struct Loss {
  LossKind kind = LossKind::squared;
  double tau = 0.5;  // pinball level

  static Loss zero_one() { return {LossKind::zero_one, 0.5}; }
  static Loss squared() { return {LossKind::squared, 0.5}; }
  static Loss pinball(double tau) { return {LossKind::pinball, tau}; }
  static Loss absolute() { return {LossKind::absolute, 0.5}; }

  /// Loss of predicting `pred` when the label is `y`.
  double operator()(double pred, double y) const noexcept {
    switch (kind) {
      case LossKind::zero_one: return pred == y ? 0.0 : 1.0;
      case LossKind::squared: return (y - pred) * (y - pred);
      case LossKind::pinball: return (y - pred) * (tau - (y < pred ? 1.0 : 0.0));
      case LossKind::absolute: return std::abs(y - pred);
    }
    return 0.0;
  }
};

inline double l1_norm(std::span<const double> v) noexcept {
  double s = 0;
  for (double x : v) s += std::abs(x);
  return s;
}

class ParamSpace {
public:
  enum class Kind { finite, interval, l1_ball };

  static ParamSpace finite(std::vector<Vector> points) {
    if (points.empty()) throw ConfigurationError("finite parameter space must be nonempty");
    const std::size_t dim = points.front().size();
    for (const auto& p : points) {
      if (p.size() != dim) throw ConfigurationError("finite parameter space mixes dimensions");
    }
    ParamSpace s(Kind::finite, dim);
    s.points_ = std::move(points);
    return s;
  }

  static ParamSpace interval(Vector lo, Vector hi) {
    if (lo.size() != hi.size() || lo.empty()) {
      throw ConfigurationError("interval bounds must be nonempty and of equal dimension");
    }
    for (std::size_t k = 0; k < lo.size(); ++k) {
      if (!(lo[k] <= hi[k])) throw ConfigurationError("interval requires lo <= hi coordinatewise");
    }
    ParamSpace s(Kind::interval, lo.size());
    s.lo_ = std::move(lo);
    s.hi_ = std::move(hi);
    return s;
  }

  static ParamSpace l1_ball(double radius, std::size_t dim) {
    if (!(radius > 0) || !std::isfinite(radius)) throw ConfigurationError("l1-ball radius must be positive");
    ParamSpace s(Kind::l1_ball, dim);
    s.radius_ = radius;
    return s;
  }

  Kind kind() const noexcept { return kind_; }
  std::size_t dim() const noexcept { return dim_; }
  const std::vector<Vector>& points() const noexcept { return points_; }
  const Vector& lo() const noexcept { return lo_; }
  const Vector& hi() const noexcept { return hi_; }
  double radius() const noexcept { return radius_; }

  bool contains(std::span<const double> theta) const noexcept {
    if (theta.size() != dim_) return false;
    switch (kind_) {
      case Kind::finite:
        return std::any_of(points_.begin(), points_.end(), [&](const Vector& p) {
          for (std::size_t k = 0; k < dim_; ++k) {
            if (std::abs(p[k] - theta[k]) > kMembershipTol) return false;
          }
          return true;
        });
      case Kind::interval:
        for (std::size_t k = 0; k < dim_; ++k) {
          if (theta[k] < lo_[k] - kMembershipTol || theta[k] > hi_[k] + kMembershipTol) return false;
        }
        return true;
      case Kind::l1_ball: return l1_norm(theta) <= radius_ + kMembershipTol;
    }
    return false;
  }

private:
  ParamSpace(Kind kind, std::size_t dim) : kind_(kind), dim_(dim) {}

  Kind kind_;
  std::size_t dim_;
  std::vector<Vector> points_;
  Vector lo_, hi_;
  double radius_ = 0;
};

/// A region A of the parameter space whose plausibility or confidence is
/// assessed. Complements are taken inside the parameter space.
class ParamRegion {
public:
  enum class Kind { finite, box, l1_ball, complement, union_of };

  static ParamRegion finite(std::vector<Vector> points) {
    ParamRegion r(Kind::finite);
    r.points_ = std::move(points);
    return r;
  }

  static ParamRegion box(Vector lo, Vector hi) {
    if (lo.size() != hi.size()) throw ConfigurationError("box bounds differ in dimension");
    ParamRegion r(Kind::box);
    r.lo_ = std::move(lo);
    r.hi_ = std::move(hi);
    return r;
  }

  static ParamRegion l1_ball(double radius) {
    if (!(radius >= 0)) throw ConfigurationError("region l1-ball radius must be nonnegative");
    ParamRegion r(Kind::l1_ball);
    r.radius_ = radius;
    return r;
  }

  static ParamRegion complement(ParamRegion of) {
    ParamRegion r(Kind::complement);
    r.parts_.push_back(std::move(of));
    return r;
  }

  static ParamRegion union_of(std::vector<ParamRegion> parts) {
    ParamRegion r(Kind::union_of);
    r.parts_ = std::move(parts);
    return r;
  }

  /// The region equal to the whole parameter space.
  static ParamRegion covering(const ParamSpace& space) {
    switch (space.kind()) {
      case ParamSpace::Kind::finite: return finite(space.points());
      case ParamSpace::Kind::interval: return box(space.lo(), space.hi());
      case ParamSpace::Kind::l1_ball: return l1_ball(space.radius());
    }
    return finite({});
  }

  Kind kind() const noexcept { return kind_; }
  const std::vector<Vector>& points() const noexcept { return points_; }
  const Vector& lo() const noexcept { return lo_; }
  const Vector& hi() const noexcept { return hi_; }
  double radius() const noexcept { return radius_; }
  const std::vector<ParamRegion>& parts() const noexcept { return parts_; }
  const ParamRegion& complemented() const { return parts_.front(); }

  bool contains(std::span<const double> theta) const noexcept {
    switch (kind_) {
      case Kind::finite:
        return std::any_of(points_.begin(), points_.end(), [&](const Vector& p) {
          if (p.size() != theta.size()) return false;
          for (std::size_t k = 0; k < p.size(); ++k) {
            if (std::abs(p[k] - theta[k]) > kMembershipTol) return false;
          }
          return true;
        });
      case Kind::box:
        if (theta.size() != lo_.size()) return false;
        for (std::size_t k = 0; k < lo_.size(); ++k) {
          if (theta[k] < lo_[k] - kMembershipTol || theta[k] > hi_[k] + kMembershipTol) return false;
        }
        return true;
      case Kind::l1_ball: return l1_norm(theta) <= radius_ + kMembershipTol;
      case Kind::complement: return !parts_.front().contains(theta);
      case Kind::union_of:
        return std::any_of(parts_.begin(), parts_.end(), [&](const ParamRegion& r) { return r.contains(theta); });
    }
    return false;
  }

private:
  explicit ParamRegion(Kind kind) : kind_(kind) {}

  Kind kind_;
  std::vector<Vector> points_;
  Vector lo_, hi_;
  double radius_ = 0;
  std::vector<ParamRegion> parts_;
};

/// The pair (hypothesis family, loss) together with the parameter space.
class ModelSpec {
public:
  ModelSpec(Family family, Loss loss, ParamSpace space)
      : family_(family), loss_(loss), space_(std::move(space)) {
    validate();
  }

  /// Constant predictor in {0, 1} under zero-one loss.
  static ModelSpec bernoulli_mode() {
    return {Family::bernoulli_mode, Loss::zero_one(), ParamSpace::finite({{0.0}, {1.0}})};
  }

  /// Linear predictor x'beta with ||beta||_1 <= radius under squared loss.
  static ModelSpec l1_linear(double radius, std::size_t dim) {
    return {Family::l1_linear, Loss::squared(), ParamSpace::l1_ball(radius, dim)};
  }

  /// Constant predictor under pinball loss at level tau, theta in [lo, hi].
  static ModelSpec constant_quantile(double tau, double lo, double hi) {
    return {Family::constant_quantile, Loss::pinball(tau), ParamSpace::interval({lo}, {hi})};
  }

  Family family() const noexcept { return family_; }
  const Loss& loss() const noexcept { return loss_; }
  const ParamSpace& space() const noexcept { return space_; }

  /// Prediction of hypothesis theta on example x.
  double predict(std::span<const double> x, std::span<const double> theta) const noexcept {
    if (family_ != Family::l1_linear) return theta[0];
    double s = 0;
    for (std::size_t k = 0; k < x.size(); ++k) s += x[k] * theta[k];
    return s;
  }

  /// Throws ConfigurationError if the sample cannot be fed to this model.
  void check_sample(const LabeledSample& sample) const {
    if (family_ == Family::l1_linear && sample.dim() != space_.dim()) {
      throw ConfigurationError("sample dimension " + std::to_string(sample.dim()) +
                               " does not match parameter dimension " + std::to_string(space_.dim()));
    }
    if (family_ == Family::bernoulli_mode) {
      for (double y : sample.labels()) {
        if (y != 0.0 && y != 1.0) throw ConfigurationError("bernoulli-mode labels must be 0 or 1");
      }
    }
  }

  void check_theta(std::span<const double> theta) const {
    if (!space_.contains(theta)) throw DomainError("parameter lies outside the parameter space");
  }

private:
  void validate() const {
    const auto k = loss_.kind;
    const bool paired = (family_ == Family::bernoulli_mode && k == LossKind::zero_one) ||
                        (family_ == Family::l1_linear && k == LossKind::squared) ||
                        (family_ == Family::constant_quantile && k == LossKind::pinball);
    if (!paired) throw ConfigurationError("unsupported family/loss pairing");
    if (k == LossKind::pinball && !(loss_.tau > 0 && loss_.tau < 1)) {
      throw ConfigurationError("pinball loss requires 0 < tau < 1");
    }
    switch (family_) {
      case Family::bernoulli_mode:
        if (space_.kind() != ParamSpace::Kind::finite || space_.dim() != 1) {
          throw ConfigurationError("bernoulli-mode needs a finite one-dimensional parameter space");
        }
        break;
      case Family::constant_quantile:
        if (space_.dim() != 1) throw ConfigurationError("constant-quantile parameters are one-dimensional");
        break;
      case Family::l1_linear:
        if (space_.kind() == ParamSpace::Kind::interval) {
          throw ConfigurationError("l1-linear needs an l1-ball or finite parameter space");
        }
        break;
    }
  }

  Family family_;
  Loss loss_;
  ParamSpace space_;
};

/// (1/m) sum_i L(h(x_i; theta), y_i), evaluated directly.
inline double empirical_risk(const ModelSpec& model, const LabeledSample& sample, std::span<const double> theta) {
  model.check_sample(sample);
  model.check_theta(theta);
  const std::size_t m = sample.size();
  if (model.loss().kind == LossKind::zero_one) {
    std::size_t wrong = 0;
    for (std::size_t i = 0; i < m; ++i) wrong += model.predict(sample.x(i), theta) != sample.y(i);
    return static_cast<double>(wrong) / static_cast<double>(m);
  }
  double total = 0;
  for (std::size_t i = 0; i < m; ++i) total += model.loss()(model.predict(sample.x(i), theta), sample.y(i));
  return std::max(0.0, total / static_cast<double>(m));
}

inline std::string to_string(Family f) {
  switch (f) {
    case Family::bernoulli_mode: return "bernoulli-mode";
    case Family::l1_linear: return "l1-linear";
    case Family::constant_quantile: return "constant-quantile";
  }
  return "?";
}

inline std::string to_string(LossKind k) {
  switch (k) {
    case LossKind::zero_one: return "zero-one";
    case LossKind::squared: return "squared";
    case LossKind::pinball: return "pinball";
    case LossKind::absolute: return "absolute";
  }
  return "?";
}

}  // namespace aerm
