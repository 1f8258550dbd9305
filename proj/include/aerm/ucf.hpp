#pragma once

#include <boost/math/distributions/binomial.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "aerm/error.hpp"

namespace aerm {

/// A uniform convergence function f(eps, alpha) with its parameters.
struct UcfSpec {
  enum class Kind { bernoulli_exact, chebyshev_variance, subexponential, quantile_variance, lasso_exponential, rademacher };

  Kind kind = Kind::bernoulli_exact;
  double variance = 0;  // V, or V_sup for quantile-variance
  double sigma2 = 0;
  double tau = 0.5;
  double c = 0;
  double M = 0;
  double lambda = 0;
  double sq_norm_sum = 0;

  static UcfSpec bernoulli_exact() { return {}; }

  static UcfSpec chebyshev_variance(double v) {
    if (!(v >= 0) || !std::isfinite(v)) throw ConfigurationError("chebyshev-variance needs V >= 0");
    UcfSpec u;
    u.kind = Kind::chebyshev_variance;
    u.variance = v;
    return u;
  }

  static UcfSpec subexponential(double sigma2) {
    if (!(sigma2 > 0) || !std::isfinite(sigma2)) throw ConfigurationError("subexponential needs sigma2 > 0");
    UcfSpec u;
    u.kind = Kind::subexponential;
    u.sigma2 = sigma2;
    return u;
  }

  static UcfSpec quantile_variance(double tau, double v_sup) {
    if (!(tau > 0 && tau < 1)) throw ConfigurationError("quantile-variance needs 0 < tau < 1");
    if (!(v_sup >= 0) || !std::isfinite(v_sup)) throw ConfigurationError("quantile-variance needs V_sup >= 0");
    UcfSpec u;
    u.kind = Kind::quantile_variance;
    u.tau = tau;
    u.variance = v_sup;
    return u;
  }

  static UcfSpec lasso_exponential(double c) {
    if (!(c > 0) || !std::isfinite(c)) throw ConfigurationError("lasso-exponential needs c > 0");
    UcfSpec u;
    u.kind = Kind::lasso_exponential;
    u.c = c;
    return u;
  }

  static UcfSpec rademacher(double M, double lambda, double sq_norm_sum) {
    if (!(M > 0) || !(lambda > 0) || !std::isfinite(M) || !std::isfinite(lambda)) {
      throw ConfigurationError("rademacher needs M > 0 and lambda > 0");
    }
    if (!(sq_norm_sum >= 0) || !std::isfinite(sq_norm_sum)) throw ConfigurationError("rademacher needs sq_norm_sum >= 0");
    UcfSpec u;
    u.kind = Kind::rademacher;
    u.M = M;
    u.lambda = lambda;
    u.sq_norm_sum = sq_norm_sum;
    return u;
  }
};

inline std::string to_string(UcfSpec::Kind k) {
  switch (k) {
    case UcfSpec::Kind::bernoulli_exact: return "bernoulli-exact";
    case UcfSpec::Kind::chebyshev_variance: return "chebyshev-variance";
    case UcfSpec::Kind::subexponential: return "subexponential";
    case UcfSpec::Kind::quantile_variance: return "quantile-variance";
    case UcfSpec::Kind::lasso_exponential: return "lasso-exponential";
    case UcfSpec::Kind::rademacher: return "rademacher";
  }
  return "?";
}

namespace detail {

inline void check_level(double alpha) {
  if (!(alpha > 0 && alpha < 1)) throw ConfigurationError("alpha must lie in (0, 1)");
}

inline void check_eps(double eps) {
  if (!(eps > 0)) throw ConfigurationError("eps must be positive");
}

/// Smallest integer >= x, at least 1. Values within 1e-12 (relative) above
/// an integer are taken as that integer, so exact requirements such as
/// 1 / (0.05 * 0.1^2) do not pick up a spurious extra sample from rounding.
inline std::uint64_t ceil_count(double x) {
  if (std::isnan(x)) throw ResourceError("sample-size requirement is undefined");
  if (x <= 1) return 1;
  if (!(x < 1.8e19)) throw ResourceError("sample-size requirement exceeds 64 bits");
  const double r = std::round(x);
  if (std::abs(x - r) <= 1e-12 * r) return static_cast<std::uint64_t>(r);
  return static_cast<std::uint64_t>(std::ceil(x));
}

// Guard on the window ends, so |ybar - p| <= eps is decided inclusively
// despite rounding in m(p +- eps).
inline constexpr double kWindowGuard = 1e-9;

/// P[lo <= X <= hi] for X ~ Binomial(m, p).
inline double binomial_window(std::uint64_t m, double p, std::int64_t lo, std::int64_t hi) {
  const auto mm = static_cast<std::int64_t>(m);
  lo = std::max<std::int64_t>(lo, 0);
  hi = std::min<std::int64_t>(hi, mm);
  if (lo > hi) return 0.0;
  if (p <= 0) return lo == 0 ? 1.0 : 0.0;
  if (p >= 1) return hi == mm ? 1.0 : 0.0;
  const boost::math::binomial_distribution<double> bin(static_cast<double>(m), p);
  const double below = lo > 0 ? boost::math::cdf(bin, static_cast<double>(lo - 1)) : 0.0;
  const double above = hi < mm ? boost::math::cdf(boost::math::complement(bin, static_cast<double>(hi))) : 0.0;
  return std::clamp(1.0 - below - above, 0.0, 1.0);
}

inline std::int64_t window_lo(std::uint64_t m, double eps, double p) {
  return static_cast<std::int64_t>(std::ceil(static_cast<double>(m) * (p - eps) - kWindowGuard));
}

inline std::int64_t window_hi(std::uint64_t m, double eps, double p) {
  return static_cast<std::int64_t>(std::floor(static_cast<double>(m) * (p + eps) + kWindowGuard));
}

inline double kl_bernoulli(double q, double p) {
  auto term = [](double a, double b) { return a <= 0 ? 0.0 : a * std::log(a / b); };
  return term(q, p) + term(1 - q, 1 - p);
}

/// Infimum over p of the coverage, or an early "below target" answer.
/// On [0, 1/2] (the coverage is symmetric under p -> 1 - p) the summation
/// window is constant between consecutive breakpoints, and for a fixed window
/// the probability is unimodal in p, so the infimum over each piece is one of
/// its two endpoint limits. With `target` set, pieces whose Chernoff lower
/// bound already reaches the target are skipped and the scan stops at the
/// first piece below it.
inline double worst_coverage_scan(std::uint64_t m, double eps, double target, bool prune) {
  if (eps >= 1) return 1.0;
  const double md = static_cast<double>(m);
  // Breakpoints of the guarded window ends.
  std::vector<double> cuts{0.0, 0.5};
  for (std::uint64_t i = 0; i <= m; ++i) {
    const double a = (static_cast<double>(i) + kWindowGuard) / md + eps;
    const double b = (static_cast<double>(i) - kWindowGuard) / md - eps;
    if (a > 0 && a < 0.5) cuts.push_back(a);
    if (b > 0 && b < 0.5) cuts.push_back(b);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  double worst = 1.0;
  // Walk from p = 1/2 outward, where the low coverage sits.
  for (std::size_t k = cuts.size() - 1; k-- > 0;) {
    const double u = cuts[k];
    const double v = cuts[k + 1];
    const double mid = 0.5 * (u + v);
    const std::int64_t lo = window_lo(m, eps, mid);
    const std::int64_t hi = window_hi(m, eps, mid);
    if (prune) {
      // Lower tail is largest at u, upper tail at v.
      double miss = 0;
      if (lo > 0) {
        const double q = static_cast<double>(lo - 1) / md;
        miss += q < u ? std::exp(-md * kl_bernoulli(q, u)) : 1.0;
      }
      if (hi < static_cast<std::int64_t>(m)) {
        const double q = static_cast<double>(hi + 1) / md;
        miss += q > v ? std::exp(-md * kl_bernoulli(q, v)) : 1.0;
      }
      if (1.0 - miss >= target) continue;
    }
    worst = std::min({worst, binomial_window(m, u, lo, hi), binomial_window(m, v, lo, hi)});
    if (prune && worst < target) return worst;
  }
  return worst;
}

}  // namespace detail

/// P[|ybar - p| <= eps] for ybar the mean of m Bernoulli(p) draws.
inline double bernoulli_exact_coverage_at(std::uint64_t m, double eps, double p) {
  if (m == 0) throw ConfigurationError("m must be positive");
  if (!(p >= 0 && p <= 1)) throw ConfigurationError("p must lie in [0, 1]");
  return detail::binomial_window(m, p, detail::window_lo(m, eps, p), detail::window_hi(m, eps, p));
}

/// inf over p in [0, 1] of P[|ybar - p| <= eps].
inline double bernoulli_exact_worst_coverage(std::uint64_t m, double eps) {
  if (m == 0) throw ConfigurationError("m must be positive");
  detail::check_eps(eps);
  return detail::worst_coverage_scan(m, eps, 0.0, false);
}

/// Whether bernoulli_exact_worst_coverage(m, eps) >= target, decided with
/// pruning and early exit.
inline bool bernoulli_exact_covers(std::uint64_t m, double eps, double target) {
  if (eps >= 1) return true;
  return detail::worst_coverage_scan(m, eps, target, true) >= target;
}

namespace detail {

// Largest m scanned exhaustively below the Hoeffding bound.
inline constexpr std::uint64_t kExactScanLimit = 4000;

inline std::uint64_t bernoulli_required_m(double eps, double alpha) {
  if (eps >= 1) return 1;
  const double target = 1 - alpha;
  // Hoeffding: every m >= m_h covers.
  const std::uint64_t m_h = ceil_count(std::log(2 / alpha) / (2 * eps * eps));
  if (m_h <= kExactScanLimit) {
    for (std::uint64_t m = m_h - 1; m >= 1; --m) {
      if (!bernoulli_exact_covers(m, eps, target)) return m + 1;
    }
    return 1;
  }
  // Exact coverage is not monotone in m; past the scan limit take the first
  // crossing found by bisection between a failing and a covering size.
  std::uint64_t lo = 1;
  if (bernoulli_exact_covers(lo, eps, target)) return 1;
  std::uint64_t hi = m_h;
  while (hi - lo > 1) {
    const std::uint64_t mid = lo + (hi - lo) / 2;
    if (bernoulli_exact_covers(mid, eps, target)) hi = mid; else lo = mid;
  }
  return hi;
}

// Smallest eps on the grid j / 2^40 with bernoulli_exact_covers(m, eps,
// target). Coverage is nondecreasing in eps, so the answer depends on m alone;
// lo is a failing hint that only narrows the search.
inline double bernoulli_pointwise_tolerance(std::uint64_t m, double target, double lo) {
  constexpr double scale = 1099511627776.0;  // 2^40
  std::uint64_t lo_j = static_cast<std::uint64_t>(std::floor(lo * scale));
  std::uint64_t hi_j = static_cast<std::uint64_t>(scale);
  while (hi_j - lo_j > 1) {
    const std::uint64_t mid = lo_j + (hi_j - lo_j) / 2;
    if (bernoulli_exact_covers(m, static_cast<double>(mid) / scale, target)) hi_j = mid; else lo_j = mid;
  }
  return static_cast<double>(hi_j) / scale;
}

// inf{eps : every m' >= m covers}: the pointwise tolerance raised by each
// larger size that fails at the current value, up to the Hoeffding size of
// that value. Sizes past kExactScanLimit are not revisited, matching
// bernoulli_required_m.
inline double bernoulli_tolerance(std::uint64_t m, double alpha) {
  const double target = 1 - alpha;
  const double L = std::log(2 / alpha);
  double t = bernoulli_pointwise_tolerance(m, target, 0);
  for (std::uint64_t k = m + 1; k <= kExactScanLimit && static_cast<double>(k) < L / (2 * t * t); ++k) {
    if (!bernoulli_exact_covers(k, t, target)) t = bernoulli_pointwise_tolerance(k, target, t);
  }
  return t;
}

inline double rademacher_tolerance(const UcfSpec& u, double m, double alpha) {
  return 4.0 * (2.0 * u.M * u.lambda / m) * std::sqrt(u.sq_norm_sum) + 6.0 * std::sqrt(std::log(4 / alpha) / (2 * m));
}

}  // namespace detail

/// Smallest m at which the bound guarantees sup |R - R_hat| <= eps with
/// probability at least 1 - alpha.
inline std::uint64_t required_m(const UcfSpec& u, double eps, double alpha) {
  detail::check_eps(eps);
  detail::check_level(alpha);
  const double L = std::log(2 / alpha);
  switch (u.kind) {
    case UcfSpec::Kind::bernoulli_exact: return detail::bernoulli_required_m(eps, alpha);
    case UcfSpec::Kind::chebyshev_variance:
    case UcfSpec::Kind::quantile_variance: return detail::ceil_count(u.variance / (alpha * eps * eps));
    case UcfSpec::Kind::subexponential: {
      // 2 exp(-min(m eps^2 / 64 sigma^4, m eps / 8 sigma^2)) <= alpha needs both
      // exponents to reach L; the quadratic one binds for eps < 8 sigma^2.
      const double quadratic = 64 * u.sigma2 * u.sigma2 / (eps * eps);
      const double linear = 8 * u.sigma2 / eps;
      return detail::ceil_count(L * std::max(quadratic, linear));
    }
    case UcfSpec::Kind::lasso_exponential: return detail::ceil_count(8 * u.c * u.c * L / eps);
    case UcfSpec::Kind::rademacher: {
      // The tolerance is decreasing in m: double, then bisect.
      std::uint64_t hi = 1;
      while (detail::rademacher_tolerance(u, static_cast<double>(hi), alpha) > eps) {
        if (hi > (std::uint64_t{1} << 62)) throw ResourceError("sample-size requirement exceeds 64 bits");
        hi *= 2;
      }
      std::uint64_t lo = hi / 2;  // fails, or is 0
      while (hi - lo > 1) {
        const std::uint64_t mid = lo + (hi - lo) / 2;
        if (detail::rademacher_tolerance(u, static_cast<double>(mid), alpha) <= eps) hi = mid; else lo = mid;
      }
      return hi;
    }
  }
  return 1;
}

/// inf{eps : the bound at sample size m guarantees eps}.
inline double coverage_tolerance(const UcfSpec& u, std::uint64_t m, double alpha) {
  if (m == 0) throw ConfigurationError("m must be positive");
  detail::check_level(alpha);
  const double md = static_cast<double>(m);
  const double L = std::log(2 / alpha);
  switch (u.kind) {
    case UcfSpec::Kind::chebyshev_variance:
    case UcfSpec::Kind::quantile_variance: return std::sqrt(u.variance / (alpha * md));
    case UcfSpec::Kind::subexponential:
      return std::max(8 * u.sigma2 * std::sqrt(L / md), 8 * u.sigma2 * L / md);
    case UcfSpec::Kind::lasso_exponential: return 8 * u.c * u.c * L / md;
    case UcfSpec::Kind::rademacher: return detail::rademacher_tolerance(u, md, alpha);
    case UcfSpec::Kind::bernoulli_exact: return detail::bernoulli_tolerance(m, alpha);
  }
  return 0;
}

/// inf{eps : m >= f(eps / 2, alpha)}, the tolerance at which the almost
/// minimizer set is a valid confidence set.
inline double validity_tolerance(const UcfSpec& u, std::uint64_t m, double alpha) {
  return 2 * coverage_tolerance(u, m, alpha);
}

}  // namespace aerm
