#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

#include "aerm/error.hpp"
#include "aerm/model.hpp"

namespace aerm {

/// Euclidean projection of v onto {beta : ||beta||_1 <= t}, by the
/// sort-and-threshold method. t = 0 maps everything to the origin.
inline Vector project_l1_ball(const Vector& v, double t) {
  if (!(t >= 0)) throw ConfigurationError("l1-ball radius must be nonnegative");
  if (l1_norm(v) <= t) return v;
  Vector out(v.size(), 0.0);
  if (t == 0) return out;
  Vector mags(v.size());
  std::transform(v.begin(), v.end(), mags.begin(), [](double x) { return std::abs(x); });
  std::sort(mags.begin(), mags.end(), std::greater<>());
  double cumulative = 0;
  double threshold = 0;
  for (std::size_t j = 0; j < mags.size(); ++j) {
    cumulative += mags[j];
    const double candidate = (cumulative - t) / static_cast<double>(j + 1);
    if (mags[j] > candidate) threshold = candidate;
  }
  for (std::size_t k = 0; k < v.size(); ++k) {
    const double shrunk = std::max(std::abs(v[k]) - threshold, 0.0);
    out[k] = std::copysign(shrunk, v[k]);
  }
  return out;
}

namespace detail {

/// Projection onto the scaled simplex {u >= 0, sum u = r}.
inline void project_simplex(Eigen::VectorXd& u, double r) {
  const auto n = u.size();
  std::vector<double> sorted(u.data(), u.data() + n);
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumulative = 0;
  double threshold = 0;
  for (Eigen::Index j = 0; j < n; ++j) {
    cumulative += sorted[j];
    const double candidate = (cumulative - r) / static_cast<double>(j + 1);
    if (sorted[j] > candidate) threshold = candidate;
  }
  for (Eigen::Index j = 0; j < n; ++j) u[j] = std::max(u[j] - threshold, 0.0);
}

/// R(beta) = beta' G beta - 2 b' beta + c, the squared-loss empirical risk of a
/// linear predictor written through the sample moments.
struct QuadraticRisk {
  Eigen::MatrixXd gram;  // X'X / m
  Eigen::VectorXd cross;  // X'y / m
  double label_power = 0;  // y'y / m
  double lipschitz = 0;  // of the gradient, 2 * lambda_max(G)

  static QuadraticRisk from_sample(const LabeledSample& sample) {
    const auto m = static_cast<Eigen::Index>(sample.size());
    const auto p = static_cast<Eigen::Index>(sample.dim());
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> x(
        sample.features().data(), m, p);
    Eigen::Map<const Eigen::VectorXd> y(sample.labels().data(), m);
    QuadraticRisk q;
    const double inv_m = 1.0 / static_cast<double>(m);
    q.gram = Eigen::MatrixXd::Zero(p, p);
    q.gram.selfadjointView<Eigen::Lower>().rankUpdate(x.transpose(), inv_m);
    q.gram = q.gram.selfadjointView<Eigen::Lower>();
    q.cross = x.transpose() * y * inv_m;
    q.label_power = y.squaredNorm() * inv_m;
    if (p > 0) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(q.gram, Eigen::EigenvaluesOnly);
      q.lipschitz = 2.0 * std::max(0.0, eig.eigenvalues().maxCoeff());
    }
    return q;
  }

  double value(const Eigen::VectorXd& beta) const {
    if (beta.size() == 0) return label_power;
    return std::max(0.0, beta.dot(gram * beta) - 2.0 * cross.dot(beta) + label_power);
  }

  Eigen::VectorXd gradient(const Eigen::VectorXd& beta) const { return 2.0 * (gram * beta - cross); }
};

/// Feasible set {lo <= beta <= hi, ||beta||_1 <= r}. Infinite bounds give the
/// plain ball.
struct BoxBall {
  Eigen::VectorXd lo, hi;
  double radius = 0;

  static BoxBall ball(Eigen::Index dim, double radius) {
    const double inf = std::numeric_limits<double>::infinity();
    return {Eigen::VectorXd::Constant(dim, -inf), Eigen::VectorXd::Constant(dim, inf), radius};
  }

  bool unboxed() const {
    return (lo.array() == -std::numeric_limits<double>::infinity()).all() &&
           (hi.array() == std::numeric_limits<double>::infinity()).all();
  }

  /// L1 norm of the point of the box closest to the origin.
  double min_l1() const {
    double s = 0;
    for (Eigen::Index j = 0; j < lo.size(); ++j) s += std::max({0.0, lo[j], -hi[j]});
    return s;
  }

  bool nonempty() const { return (lo.array() <= hi.array()).all() && min_l1() <= radius + kMembershipTol; }

  bool contains(const Eigen::VectorXd& v) const {
    return (v.array() >= lo.array() - kMembershipTol).all() && (v.array() <= hi.array() + kMembershipTol).all() &&
           v.lpNorm<1>() <= radius + kMembershipTol;
  }

  bool box_inside_ball() const {
    if (!lo.allFinite() || !hi.allFinite()) return false;
    double s = 0;
    for (Eigen::Index j = 0; j < lo.size(); ++j) s += std::max(std::abs(lo[j]), std::abs(hi[j]));
    return s <= radius + kMembershipTol;
  }

  void project(Eigen::VectorXd& v) const {
    if (unboxed()) {
      Vector raw(v.data(), v.data() + v.size());
      const Vector proj = project_l1_ball(raw, radius);
      v = Eigen::Map<const Eigen::VectorXd>(proj.data(), v.size());
      return;
    }
    // x_j(lambda) = clamp(soft(v_j, lambda), lo_j, hi_j); ||x(lambda)||_1 is
    // nonincreasing in lambda, so bisect for the active budget.
    auto shrink = [&](double lambda, Eigen::VectorXd& out) {
      for (Eigen::Index j = 0; j < v.size(); ++j) {
        const double soft = std::copysign(std::max(std::abs(v[j]) - lambda, 0.0), v[j]);
        out[j] = std::clamp(soft, lo[j], hi[j]);
      }
      return out.lpNorm<1>();
    };
    Eigen::VectorXd out(v.size());
    if (shrink(0.0, out) <= radius) {
      v = out;
      return;
    }
    double lo_lambda = 0;
    double hi_lambda = v.lpNorm<Eigen::Infinity>();
    for (int it = 0; it < 200 && hi_lambda - lo_lambda > 1e-16 * (1 + hi_lambda); ++it) {
      const double mid = 0.5 * (lo_lambda + hi_lambda);
      if (shrink(mid, out) > radius) lo_lambda = mid; else hi_lambda = mid;
    }
    shrink(hi_lambda, out);
    v = out;
  }

  /// min over the set of g's, i.e. the linear minimization oracle value.
  /// Greedy fractional knapsack: start at the box point nearest the origin and
  /// spend the remaining L1 budget on the steepest coordinates.
  double lmo_value(const Eigen::VectorXd& g) const {
    if (unboxed()) return -radius * g.lpNorm<Eigen::Infinity>();
    const Eigen::Index n = g.size();
    Eigen::VectorXd s(n);
    for (Eigen::Index j = 0; j < n; ++j) s[j] = std::clamp(0.0, lo[j], hi[j]);
    double budget = radius - s.lpNorm<1>();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return std::abs(g[a]) > std::abs(g[b]); });
    for (auto j : order) {
      if (budget <= 0 || g[j] == 0) break;
      // Moving against the gradient; every unit costs one unit of budget
      // because s_j starts at the box point of smallest magnitude.
      const double room = g[j] > 0 ? s[j] - lo[j] : hi[j] - s[j];
      const bool toward_zero = (g[j] > 0 && s[j] > 0) || (g[j] < 0 && s[j] < 0);
      if (toward_zero) continue;  // s_j is already at the bound nearest zero
      const double step = std::min(room, budget);
      s[j] += g[j] > 0 ? -step : step;
      budget -= step;
    }
    return g.dot(s);
  }
};

/// Face {beta : sign_j beta_j >= 0, sum sign_j beta_j = r} of the L1 sphere,
/// solved in u = sign .* beta coordinates on the simplex.
struct SimplexFace {
  double radius = 0;
  void project(Eigen::VectorXd& u) const { project_simplex(u, radius); }
  double lmo_value(const Eigen::VectorXd& g) const { return g.size() == 0 ? 0.0 : radius * g.minCoeff(); }
};

struct SolverOptions {
  int max_iterations = 10000;
  double tolerance = kTolOpt;
};

/// Projected gradient descent with step 1/L on a convex quadratic over a
/// polytope. Stops when the Frank-Wolfe gap, an upper bound on the
/// suboptimality, drops below the tolerance (relative once the risk exceeds 1).
template <class Set>
Eigen::VectorXd minimize_quadratic(const QuadraticRisk& q, const Set& set, Eigen::VectorXd x,
                                   const SolverOptions& options = {}) {
  set.project(x);
  if (x.size() == 0) return x;
  // G = 0 forces X = 0 and hence b = 0: the risk is constant.
  if (q.lipschitz <= 0) return x;
  Eigen::VectorXd best = x;
  double best_value = q.value(x);
  for (int it = 0; it < options.max_iterations; ++it) {
    const Eigen::VectorXd g = q.gradient(x);
    const double gap = g.dot(x) - set.lmo_value(g);
    if (gap <= options.tolerance * std::max(1.0, q.value(x))) return x;
    x -= g / q.lipschitz;
    set.project(x);
    const double v = q.value(x);
    if (v < best_value) {
      best_value = v;
      best = x;
    }
  }
  throw ConvergenceError("projected gradient did not reach the optimality gap within the iteration budget",
                         Vector(best.data(), best.data() + best.size()), best_value);
}

}  // namespace detail
}  // namespace aerm
