#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <iterator>
#include <limits>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

#include "aerm/error.hpp"
#include "aerm/l1.hpp"
#include "aerm/model.hpp"
#include "aerm/sample.hpp"

namespace aerm {

struct ErmResult {
  Vector theta;
  double min_risk = 0;
};

namespace detail {

struct Interval {
  double lo, hi;
};

inline std::vector<Interval> merge_intervals(std::vector<Interval> parts) {
  std::sort(parts.begin(), parts.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  std::vector<Interval> out;
  for (const auto& iv : parts) {
    if (!out.empty() && iv.lo <= out.back().hi) {
      out.back().hi = std::max(out.back().hi, iv.hi);
    } else {
      out.push_back(iv);
    }
  }
  return out;
}

/// One convex (or finite) piece of region ∩ Θ for an l1-ball parameter space.
struct L1Piece {
  enum class Kind { points, box_ball, shell } kind;
  std::vector<Vector> points;
  BoxBall set;
  double inner = 0;  // shell: {inner <= ||beta||_1 <= radius}
};

inline bool lex_less(const Vector& a, const Vector& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

}  // namespace detail

/// Empirical risk of one sample as a function of theta, with the sufficient
/// statistics of the family precomputed, and the minimizations over regions
/// that the almost-minimizer sets are decided with.
class RiskSurface {
public:
  RiskSurface(const ModelSpec& model, const LabeledSample& sample) : model_(model) {
    model_.check_sample(sample);
    m_ = sample.size();
    switch (model_.family()) {
      case Family::bernoulli_mode:
        ones_ = static_cast<std::size_t>(
            std::count(sample.labels().begin(), sample.labels().end(), 1.0));
        break;
      case Family::constant_quantile: {
        sorted_.assign(sample.labels().begin(), sample.labels().end());
        std::sort(sorted_.begin(), sorted_.end());
        prefix_.resize(m_ + 1, 0.0);
        for (std::size_t i = 0; i < m_; ++i) prefix_[i + 1] = prefix_[i] + sorted_[i];
        break;
      }
      case Family::l1_linear: quad_ = detail::QuadraticRisk::from_sample(sample); break;
    }
    erm_ = solve_erm();
  }

  const ModelSpec& model() const noexcept { return model_; }
  std::size_t size() const noexcept { return m_; }
  const ErmResult& erm() const noexcept { return erm_; }
  double min_risk() const noexcept { return erm_.min_risk; }

  /// Empirical risk at a feasible theta.
  double value(std::span<const double> theta) const {
    model_.check_theta(theta);
    return raw_value(theta);
  }

  double min_over(const ParamRegion& region) const { return extremum(region, false); }
  double max_over(const ParamRegion& region) const { return extremum(region, true); }

  /// Calls fn(theta, risk) for every point of a finite parameter space.
  template <class Fn>
  void for_each_point(Fn&& fn) const {
    for (const auto& p : model_.space().points()) fn(p, raw_value(p));
  }

private:
  double raw_value(std::span<const double> theta) const {
    const double m = static_cast<double>(m_);
    switch (model_.family()) {
      case Family::bernoulli_mode:
        if (theta[0] == 0.0) return static_cast<double>(ones_) / m;
        if (theta[0] == 1.0) return static_cast<double>(m_ - ones_) / m;
        return 1.0;
      case Family::constant_quantile: {
        const double t = theta[0];
        const double tau = model_.loss().tau;
        const auto k = static_cast<std::size_t>(std::lower_bound(sorted_.begin(), sorted_.end(), t) -
                                                sorted_.begin());
        const double below = prefix_[k];
        const double above = prefix_[m_] - below;
        const double r = tau * (above - static_cast<double>(m_ - k) * t) +
                         (1.0 - tau) * (static_cast<double>(k) * t - below);
        return std::max(0.0, r / m);
      }
      case Family::l1_linear:
        return quad_.value(Eigen::Map<const Eigen::VectorXd>(theta.data(), static_cast<Eigen::Index>(theta.size())));
    }
    return 0.0;
  }

  ErmResult finite_erm() const {
    const auto& pts = model_.space().points();
    std::size_t best = 0;
    double best_value = raw_value(pts[0]);
    for (std::size_t i = 1; i < pts.size(); ++i) {
      const double v = raw_value(pts[i]);
      if (v < best_value || (v == best_value && detail::lex_less(pts[i], pts[best]))) {
        best = i;
        best_value = v;
      }
    }
    return {pts[best], best_value};
  }

  ErmResult solve_erm() const {
    const auto& space = model_.space();
    if (space.kind() == ParamSpace::Kind::finite) return finite_erm();
    if (model_.family() == Family::constant_quantile) {
      // Lower sample tau-quantile, the order statistic of rank ceil(tau m).
      const double rank = std::ceil(model_.loss().tau * static_cast<double>(m_) * (1.0 - 1e-12));
      const auto k = std::clamp<std::size_t>(static_cast<std::size_t>(rank), 1, m_);
      const double theta = std::clamp(sorted_[k - 1], space.lo()[0], space.hi()[0]);
      return {{theta}, raw_value(std::span<const double>(&theta, 1))};
    }
    const auto p = static_cast<Eigen::Index>(space.dim());
    const Eigen::VectorXd beta =
        detail::minimize_quadratic(quad_, detail::BoxBall::ball(p, space.radius()), Eigen::VectorXd::Zero(p));
    Vector theta(beta.data(), beta.data() + p);
    return {theta, quad_.value(beta)};
  }

  double extremum(const ParamRegion& region, bool maximize) const {
    switch (model_.space().kind()) {
      case ParamSpace::Kind::finite: return finite_extremum(region, maximize);
      case ParamSpace::Kind::interval: return interval_extremum(region, maximize);
      case ParamSpace::Kind::l1_ball: return l1_extremum(region, maximize);
    }
    return 0.0;
  }

  double finite_extremum(const ParamRegion& region, bool maximize) const {
    bool any = false;
    double best = 0;
    for (const auto& p : model_.space().points()) {
      if (!region.contains(p)) continue;
      const double v = raw_value(p);
      if (!any || (maximize ? v > best : v < best)) best = v;
      any = true;
    }
    if (!any) throw EmptyRegionError("region contains no point of the parameter space");
    return best;
  }

  // Region ∩ [lo, hi] as closed intervals. Complements are closed up, which
  // does not change infima or suprema of the continuous risk.
  std::vector<detail::Interval> intervals_of(const ParamRegion& region) const {
    const double lo = model_.space().lo()[0];
    const double hi = model_.space().hi()[0];
    std::vector<detail::Interval> out;
    auto add = [&](double a, double b) {
      a = std::max(a, lo);
      b = std::min(b, hi);
      if (a <= b) out.push_back({a, b});
    };
    switch (region.kind()) {
      case ParamRegion::Kind::finite:
        for (const auto& p : region.points()) {
          if (p.size() != 1) throw ConfigurationError("region point dimension does not match parameters");
          if (p[0] >= lo - kMembershipTol && p[0] <= hi + kMembershipTol) {
            const double v = std::clamp(p[0], lo, hi);
            out.push_back({v, v});
          }
        }
        break;
      case ParamRegion::Kind::box:
        if (region.lo().size() != 1) throw ConfigurationError("region box dimension does not match parameters");
        add(region.lo()[0], region.hi()[0]);
        break;
      case ParamRegion::Kind::l1_ball: add(-region.radius(), region.radius()); break;
      case ParamRegion::Kind::union_of:
        for (const auto& part : region.parts()) {
          const auto sub = intervals_of(part);
          out.insert(out.end(), sub.begin(), sub.end());
        }
        break;
      case ParamRegion::Kind::complement: {
        const auto inner = detail::merge_intervals(intervals_of(region.complemented()));
        if (inner.empty()) {
          out.push_back({lo, hi});
          break;
        }
        double cursor = lo;
        for (const auto& iv : inner) {
          if (iv.lo > cursor) out.push_back({cursor, iv.lo});
          cursor = std::max(cursor, iv.hi);
        }
        if (cursor < hi) out.push_back({cursor, hi});
        break;
      }
    }
    return detail::merge_intervals(std::move(out));
  }

  double interval_extremum(const ParamRegion& region, bool maximize) const {
    const auto parts = intervals_of(region);
    if (parts.empty()) throw EmptyRegionError("region does not meet the parameter interval");
    // Pinball risk is convex in theta.
    const double theta_hat = erm_.theta[0];
    double best = 0;
    bool any = false;
    for (const auto& iv : parts) {
      double v;
      if (maximize) {
        v = std::max(raw_value(std::span<const double>(&iv.lo, 1)), raw_value(std::span<const double>(&iv.hi, 1)));
      } else {
        const double at = std::clamp(theta_hat, iv.lo, iv.hi);
        v = raw_value(std::span<const double>(&at, 1));
      }
      if (!any || (maximize ? v > best : v < best)) best = v;
      any = true;
    }
    return best;
  }

  std::vector<detail::L1Piece> pieces_of(const ParamRegion& region) const {
    using detail::L1Piece;
    const auto& space = model_.space();
    const double t = space.radius();
    const auto p = static_cast<Eigen::Index>(space.dim());
    std::vector<L1Piece> out;
    auto whole = [&] { out.push_back({L1Piece::Kind::box_ball, {}, detail::BoxBall::ball(p, t), 0}); };
    switch (region.kind()) {
      case ParamRegion::Kind::finite: {
        L1Piece piece{L1Piece::Kind::points, {}, {}, 0};
        for (const auto& pt : region.points()) {
          if (space.contains(pt)) piece.points.push_back(pt);
        }
        if (!piece.points.empty()) out.push_back(std::move(piece));
        break;
      }
      case ParamRegion::Kind::box: {
        if (region.lo().size() != space.dim()) {
          throw ConfigurationError("region box dimension does not match parameters");
        }
        detail::BoxBall set{Eigen::Map<const Eigen::VectorXd>(region.lo().data(), p),
                            Eigen::Map<const Eigen::VectorXd>(region.hi().data(), p), t};
        if (set.nonempty()) out.push_back({L1Piece::Kind::box_ball, {}, std::move(set), 0});
        break;
      }
      case ParamRegion::Kind::l1_ball:
        out.push_back({L1Piece::Kind::box_ball, {}, detail::BoxBall::ball(p, std::min(t, region.radius())), 0});
        break;
      case ParamRegion::Kind::union_of:
        for (const auto& part : region.parts()) {
          auto sub = pieces_of(part);
          std::move(sub.begin(), sub.end(), std::back_inserter(out));
        }
        break;
      case ParamRegion::Kind::complement: {
        const ParamRegion& inner = region.complemented();
        switch (inner.kind()) {
          case ParamRegion::Kind::finite: whole(); break;  // closure of Θ minus finitely many points
          case ParamRegion::Kind::l1_ball:
            if (inner.radius() < t) out.push_back({L1Piece::Kind::shell, {}, {}, inner.radius()});
            break;
          case ParamRegion::Kind::complement: return pieces_of(inner.complemented());
          case ParamRegion::Kind::union_of:
            if (std::all_of(inner.parts().begin(), inner.parts().end(),
                            [](const ParamRegion& r) { return r.kind() == ParamRegion::Kind::finite; })) {
              whole();
              break;
            }
            throw UnsupportedOperationError("complement of a union of non-finite regions is not supported");
          case ParamRegion::Kind::box:
            throw UnsupportedOperationError("complement of a box is not supported on an l1-ball parameter space");
        }
        break;
      }
    }
    return out;
  }

  double l1_vertex_max(double radius) const {
    const auto p = static_cast<Eigen::Index>(model_.space().dim());
    if (p == 0) return quad_.value(Eigen::VectorXd());
    double best = 0;
    Eigen::VectorXd v = Eigen::VectorXd::Zero(p);
    for (Eigen::Index j = 0; j < p; ++j) {
      for (double s : {radius, -radius}) {
        v[j] = s;
        best = std::max(best, quad_.value(v));
      }
      v[j] = 0;
    }
    return best;
  }

  double shell_min(double inner) const {
    const auto& theta_hat = erm_.theta;
    if (l1_norm(theta_hat) >= inner - kMembershipTol) return erm_.min_risk;
    // The global minimizer lies strictly inside the inner ball, so the
    // minimum over the shell is attained on the sphere ||beta||_1 = inner.
    // Solve it face by face; each sign pattern gives a simplex problem.
    const auto p = static_cast<Eigen::Index>(model_.space().dim());
    if (p > 16) throw UnsupportedOperationError("ball complements are supported up to dimension 16");
    if (p == 0) return quad_.value(Eigen::VectorXd());
    const detail::SimplexFace face{inner};
    double best = std::numeric_limits<double>::infinity();
    for (std::uint32_t mask = 0; mask < (1u << p); ++mask) {
      Eigen::VectorXd sign(p);
      for (Eigen::Index j = 0; j < p; ++j) sign[j] = (mask >> j) & 1u ? -1.0 : 1.0;
      detail::QuadraticRisk q;
      q.gram = sign.asDiagonal() * quad_.gram * sign.asDiagonal();
      q.cross = sign.cwiseProduct(quad_.cross);
      q.label_power = quad_.label_power;
      q.lipschitz = quad_.lipschitz;
      Eigen::VectorXd u = Eigen::VectorXd::Constant(p, inner / static_cast<double>(p));
      u = detail::minimize_quadratic(q, face, u);
      best = std::min(best, q.value(u));
    }
    return best;
  }

  double l1_extremum(const ParamRegion& region, bool maximize) const {
    using detail::L1Piece;
    const auto parts = pieces_of(region);
    if (parts.empty()) throw EmptyRegionError("region does not meet the parameter ball");
    const auto p = static_cast<Eigen::Index>(model_.space().dim());
    const Eigen::Map<const Eigen::VectorXd> beta_hat(erm_.theta.data(), p);
    double best = maximize ? 0.0 : std::numeric_limits<double>::infinity();
    for (const auto& piece : parts) {
      double v = 0;
      switch (piece.kind) {
        case L1Piece::Kind::points: {
          v = raw_value(piece.points.front());
          for (const auto& pt : piece.points) v = maximize ? std::max(v, raw_value(pt)) : std::min(v, raw_value(pt));
          break;
        }
        case L1Piece::Kind::box_ball:
          if (!maximize) {
            if (piece.set.contains(beta_hat)) {
              v = erm_.min_risk;
            } else {
              v = quad_.value(detail::minimize_quadratic(quad_, piece.set, Eigen::VectorXd(beta_hat)));
            }
          } else if (piece.set.unboxed()) {
            v = l1_vertex_max(piece.set.radius);
          } else if (piece.set.box_inside_ball() && p <= 20) {
            // A convex function on a box peaks at a corner.
            Eigen::VectorXd corner(p);
            for (std::uint32_t mask = 0; mask < (1u << p); ++mask) {
              for (Eigen::Index j = 0; j < p; ++j) corner[j] = (mask >> j) & 1u ? piece.set.hi[j] : piece.set.lo[j];
              v = std::max(v, quad_.value(corner));
            }
          } else {
            throw UnsupportedOperationError("maximum over a box cut by the l1 ball is not supported");
          }
          break;
        case L1Piece::Kind::shell:
          v = maximize ? l1_vertex_max(model_.space().radius()) : shell_min(piece.inner);
          break;
      }
      best = maximize ? std::max(best, v) : std::min(best, v);
    }
    return best;
  }

  ModelSpec model_;
  std::size_t m_ = 0;
  std::size_t ones_ = 0;
  std::vector<double> sorted_, prefix_;
  detail::QuadraticRisk quad_;
  ErmResult erm_;
};

/// Empirical risk minimizer and the minimal empirical risk.
inline ErmResult erm_solve(const ModelSpec& model, const LabeledSample& sample) {
  return RiskSurface(model, sample).erm();
}

inline double region_min_empirical_risk(const ModelSpec& model, const LabeledSample& sample,
                                        const ParamRegion& region) {
  return RiskSurface(model, sample).min_over(region);
}

inline double region_max_empirical_risk(const ModelSpec& model, const LabeledSample& sample,
                                        const ParamRegion& region) {
  return RiskSurface(model, sample).max_over(region);
}

}  // namespace aerm
