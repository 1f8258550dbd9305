#pragma once

#include <boost/math/distributions/normal.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "aerm/error.hpp"
#include "aerm/l1.hpp"
#include "aerm/model.hpp"
#include "aerm/rng.hpp"
#include "aerm/sample.hpp"

namespace aerm {

/// A named one-dimensional law for label-only samples.
struct Law {
  enum class Kind { uniform, point_mass, normal, exponential } kind = Kind::uniform;
  double a = 0;  // uniform lo, atom, normal mean, exponential rate
  double b = 1;  // uniform hi, normal sd

  static Law uniform(double lo, double hi) {
    if (!(lo < hi)) throw ConfigurationError("uniform law needs lo < hi");
    return {Kind::uniform, lo, hi};
  }
  static Law point_mass(double at) { return {Kind::point_mass, at, 0}; }
  static Law normal(double mean, double sd) {
    if (!(sd > 0)) throw ConfigurationError("normal law needs sd > 0");
    return {Kind::normal, mean, sd};
  }
  static Law exponential(double rate) {
    if (!(rate > 0)) throw ConfigurationError("exponential law needs rate > 0");
    return {Kind::exponential, rate, 0};
  }

  double draw(Stream& s) const {
    switch (kind) {
      case Kind::uniform: return s.uniform(a, b);
      case Kind::point_mass: return a;
      case Kind::normal: return a + b * s.normal();
      case Kind::exponential: return -std::log1p(-s.uniform()) / a;
    }
    return 0;
  }

  /// Quantile function on (0, 1).
  double quantile(double u) const {
    switch (kind) {
      case Kind::uniform: return a + (b - a) * u;
      case Kind::point_mass: return a;
      case Kind::normal: return boost::math::quantile(boost::math::normal_distribution<double>(a, b), u);
      case Kind::exponential: return -std::log1p(-u) / a;
    }
    return 0;
  }

  double cdf(double y) const {
    switch (kind) {
      case Kind::uniform: return std::clamp((y - a) / (b - a), 0.0, 1.0);
      case Kind::point_mass: return y >= a ? 1.0 : 0.0;
      case Kind::normal: return boost::math::cdf(boost::math::normal_distribution<double>(a, b), y);
      case Kind::exponential: return y <= 0 ? 0.0 : -std::expm1(-a * y);
    }
    return 0;
  }
};

inline std::string to_string(Law::Kind k) {
  switch (k) {
    case Law::Kind::uniform: return "uniform";
    case Law::Kind::point_mass: return "point-mass";
    case Law::Kind::normal: return "normal";
    case Law::Kind::exponential: return "exponential";
  }
  return "?";
}

/// Synthetic data-generating distribution D together with the sample size.
struct GeneratorSpec {
  enum class Kind { bernoulli, lasso_linear, labeled_distribution } kind = Kind::bernoulli;
  double p = 0.5;  // bernoulli success probability
  Vector beta0;  // lasso-linear: y = x'beta0 + u, x ~ Unif(-1,1)^p, u ~ Unif(-1,1)
  Law law;
  std::uint64_t m = 1;

  static GeneratorSpec bernoulli(double p, std::uint64_t m) {
    if (!(p >= 0 && p <= 1)) throw ConfigurationError("bernoulli generator needs 0 <= p <= 1");
    GeneratorSpec g;
    g.kind = Kind::bernoulli;
    g.p = p;
    g.m = m;
    g.validate();
    return g;
  }

  static GeneratorSpec lasso_linear(Vector beta0, std::uint64_t m) {
    for (double b : beta0) {
      if (!std::isfinite(b)) throw ConfigurationError("beta0 must be finite");
    }
    GeneratorSpec g;
    g.kind = Kind::lasso_linear;
    g.beta0 = std::move(beta0);
    g.m = m;
    g.validate();
    return g;
  }

  static GeneratorSpec labeled_distribution(Law law, std::uint64_t m) {
    GeneratorSpec g;
    g.kind = Kind::labeled_distribution;
    g.law = law;
    g.m = m;
    g.validate();
    return g;
  }

  void validate() const {
    if (m < 1) throw ConfigurationError("generator sample size must be at least 1");
  }

  /// Example dimension of the generated samples.
  std::size_t dim() const noexcept { return kind == Kind::lasso_linear ? beta0.size() : 0; }

  LabeledSample draw(Stream& s) const {
    const std::size_t n = static_cast<std::size_t>(m);
    std::vector<double> y(n);
    switch (kind) {
      case Kind::bernoulli:
        for (auto& v : y) v = s.bernoulli(p) ? 1.0 : 0.0;
        return LabeledSample::labels_only(std::move(y));
      case Kind::labeled_distribution:
        for (auto& v : y) v = law.draw(s);
        return LabeledSample::labels_only(std::move(y));
      case Kind::lasso_linear: {
        const std::size_t d = beta0.size();
        std::vector<double> x(n * d);
        for (std::size_t i = 0; i < n; ++i) {
          double fit = 0;
          for (std::size_t k = 0; k < d; ++k) {
            x[i * d + k] = s.uniform(-1.0, 1.0);
            fit += x[i * d + k] * beta0[k];
          }
          y[i] = fit + s.uniform(-1.0, 1.0);
        }
        return LabeledSample(d, std::move(x), std::move(y));
      }
    }
    return LabeledSample::labels_only({0.0});
  }
};

/// The risk minimizer of the model under the generator. More than one point
/// means the minimizer is not unique.
struct TrueMinimizer {
  std::vector<Vector> points;
  bool unique() const noexcept { return points.size() == 1; }
};

inline TrueMinimizer true_risk_minimizer(const GeneratorSpec& gen, const ModelSpec& model) {
  switch (gen.kind) {
    case GeneratorSpec::Kind::bernoulli:
      if (model.family() != Family::bernoulli_mode) {
        throw ConfigurationError("bernoulli generator pairs with the bernoulli-mode model");
      }
      if (gen.p < 0.5) return {{{0.0}}};
      if (gen.p > 0.5) return {{{1.0}}};
      return {{{0.0}, {1.0}}};
    case GeneratorSpec::Kind::lasso_linear: {
      if (model.family() != Family::l1_linear || model.space().kind() != ParamSpace::Kind::l1_ball ||
          model.space().dim() != gen.beta0.size()) {
        throw ConfigurationError("lasso-linear generator pairs with an l1-linear model of the same dimension");
      }
      // E[x x'] = I/3, so the risk is ||beta - beta0||^2 / 3 + E[u^2] and its
      // minimizer over the ball is the Euclidean projection of beta0.
      return {{project_l1_ball(gen.beta0, model.space().radius())}};
    }
    case GeneratorSpec::Kind::labeled_distribution: {
      if (model.family() != Family::constant_quantile) {
        throw ConfigurationError("labeled-distribution generator pairs with the constant-quantile model");
      }
      const double q = gen.law.quantile(model.loss().tau);
      return {{{std::clamp(q, model.space().lo()[0], model.space().hi()[0])}}};
    }
  }
  return {};
}

/// var[tau Y - (Y - theta) I(Y < theta)] under the law, by Gauss-Kronrod in
/// quantile space split at F(theta).
inline double quantile_score_variance(const Law& law, double tau, double theta) {
  if (law.kind == Law::Kind::point_mass) return 0.0;
  auto score = [&](double u) {
    const double y = law.quantile(u);
    return tau * y - (y < theta ? y - theta : 0.0);
  };
  auto integrate = [&](auto&& f) {
    const double split = std::clamp(law.cdf(theta), 0.0, 1.0);
    double total = 0;
    if (split > 0) total += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, split, 15, 1e-12);
    if (split < 1) total += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, split, 1.0, 15, 1e-12);
    return total;
  };
  const double mean = integrate(score);
  const double second = integrate([&](double u) {
    const double d = score(u) - mean;
    return d * d;
  });
  return std::max(0.0, second);
}

/// sup over theta in [lo, hi] of the score variance, on a uniform grid.
inline double quantile_v_sup(const Law& law, double tau, double lo, double hi, int grid = 401) {
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo <= hi)) {
    throw ConfigurationError("V_sup needs a finite parameter interval");
  }
  double best = 0;
  for (int k = 0; k < grid; ++k) {
    const double theta = grid == 1 ? lo : lo + (hi - lo) * k / (grid - 1);
    best = std::max(best, quantile_score_variance(law, tau, theta));
  }
  return best;
}

}  // namespace aerm
