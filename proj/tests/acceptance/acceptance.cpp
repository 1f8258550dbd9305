// Acceptance checks, one PASS/FAIL line per criterion. Exit status is the
// number of failing criteria.

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "../support/cli.hpp"
#include "aerm/aerm.hpp"
#include "aerm/io.hpp"

using namespace aerm;
using aerm::testing::config_path;
using aerm::testing::run_cli;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// ---- 1 ----------------------------------------------------------------------

Outcome type1_bound_arithmetic() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = run_cli("bound --B 50");
  const double elapsed = seconds_since(t0);
  if (r.exit_code != 0) return {false, "aermctl bound exited with " + std::to_string(r.exit_code)};
  const double bound = io::parse_json_text(r.out, "bound").at("bound").get<double>();
  const bool ok = std::abs(bound - 0.242) <= 0.005 && elapsed < 1.0;
  return {ok, "bound " + fmt("%.6f", bound) + " in " + fmt("%.3f", elapsed) + " s"};
}

// ---- 2 ----------------------------------------------------------------------

Outcome bernstein_bound() {
  using Big = boost::multiprecision::cpp_bin_float_50;
  const auto t0 = std::chrono::steady_clock::now();
  bool ok = true;
  std::string detail;
  const std::vector<std::pair<std::string, std::uint64_t>> cases = {{"0.025", 3050}, {"0.05", 640}, {"0.5", 3}};
  for (const auto& [g, expected] : cases) {
    const Big gamma(g);
    const Big exact = (4 * gamma + 3) * log(1 / gamma) / (6 * gamma * gamma);
    const auto oracle = static_cast<std::uint64_t>(ceil(exact));
    const auto lib = bernstein_min_B(std::stod(g));
    const auto cli = run_cli("minb --gamma " + g);
    const auto via_cli =
        cli.exit_code == 0 ? io::parse_json_text(cli.out, "minb").at("B").get<std::uint64_t>() : std::uint64_t{0};
    ok = ok && lib == oracle && via_cli == oracle && oracle == expected;
    detail += "gamma " + g + " -> " + std::to_string(lib) + " (oracle " + std::to_string(oracle) + ") ";
  }
  const double elapsed = seconds_since(t0);
  ok = ok && elapsed < 1.0;
  return {ok, detail + "in " + fmt("%.3f", elapsed) + " s"};
}

// ---- 3 ----------------------------------------------------------------------

Outcome lasso_curve() {
  const auto t0 = std::chrono::steady_clock::now();
  LassoCurveConfig cfg = io::lasso_curve_config_from_json(io::read_json_file(config_path("lasso-plaus-curve.json")));
  // First seed whose drawn beta0 has l1 norm in [3, 3.7].
  std::uint64_t seed = 1;
  while (true) {
    const double n = l1_norm(draw_beta0(cfg.p, seed));
    if (n >= 3.0 && n <= 3.7) break;
    ++seed;
  }
  cfg.seed = seed;
  cfg.replicates = 1000;
  const auto curve = run_lasso_plaus_curve(cfg);
  const double elapsed = seconds_since(t0);
  bool monotone = true;
  double best = 0, best_err = 0;
  for (const auto& row : curve.rows) {
    if (row.plausibility + 3 * row.mc_error < best - 3 * best_err) monotone = false;
    if (row.plausibility > best) {
      best = row.plausibility;
      best_err = row.mc_error;
    }
  }
  const auto& last = curve.rows.back();
  const bool at_t = last.t_prime == cfg.t && last.plausibility == 1.0;
  const bool crossing = curve.crossing && *curve.crossing >= 0.8 && *curve.crossing <= 2.0;
  const bool ok = monotone && at_t && crossing && elapsed < 300;
  std::ostringstream d;
  d << "seed " << seed << ", ||beta0||_1 " << fmt("%.4f", curve.beta0_l1) << ", eps " << fmt("%.4f", curve.eps)
    << ", crossing " << (curve.crossing ? fmt("%.2f", *curve.crossing) : std::string("none")) << ", monotone "
    << (monotone ? "yes" : "no") << ", pl(t) " << fmt("%.3f", last.plausibility) << ", " << fmt("%.1f", elapsed)
    << " s";
  return {ok, d.str()};
}

// ---- 4 ----------------------------------------------------------------------

// Worst coverage over a 20001-point p-grid plus both sides of every
// discontinuity, from binomial pmf recursion in long double.
long double grid_worst_coverage(std::uint64_t m, double eps) {
  std::vector<long double> ps;
  for (int k = 0; k <= 20000; ++k) ps.push_back(k / 40000.0L);
  for (std::uint64_t i = 0; i <= m; ++i) {
    for (long double c : {static_cast<long double>(i) / m + eps, static_cast<long double>(i) / m - eps}) {
      for (long double d : {-1e-10L, 1e-10L}) {
        if (c + d > 0 && c + d <= 0.5L) ps.push_back(c + d);
      }
    }
  }
  long double worst = 1;
  for (long double p : ps) {
    if (p <= 0) continue;
    long double logpmf = m * std::log1p(-p);  // i = 0
    long double cov = 0;
    const long double ratio = p / (1 - p);
    for (std::uint64_t i = 0; i <= m; ++i) {
      if (i > 0) logpmf += std::log(static_cast<long double>(m - i + 1) / i * ratio);
      if (std::abs(static_cast<long double>(i) / m - p) <= eps + 1e-12L) cov += std::exp(logpmf);
    }
    worst = std::min(worst, cov);
  }
  return worst;
}

Outcome bernoulli_coverage() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto cfg = io::bernoulli_coverage_config_from_json(io::read_json_file(config_path("bernoulli-coverage.json")));
  const auto result = run_bernoulli_coverage(cfg);
  const double elapsed = seconds_since(t0);
  const double target = 1 - (cfg.alpha - cfg.gamma);
  const double half_gap = (1 - 2 * cfg.p) / 2;
  const std::uint64_t ms = result.m_star;
  // Oracle: m* - 1 fails on the grid; m* and the next sizes cover.
  bool oracle = grid_worst_coverage(ms - 1, half_gap) < target;
  for (std::uint64_t m = ms; m < ms + 40 && oracle; ++m) oracle = grid_worst_coverage(m, half_gap) >= target;
  bool freq = result.B == 3050 && cfg.trials == 200;
  std::string rows;
  for (const auto& r : result.rows) {
    if (r.m >= ms && r.frequency < 0.92) freq = false;
    rows += std::to_string(r.m) + ":" + fmt("%.3f", r.frequency) + " ";
  }
  const bool ok = oracle && freq && elapsed < 600;
  return {ok, "m* " + std::to_string(ms) + " (oracle " + (oracle ? "agrees" : "disagrees") + "), frequency " + rows +
                  "in " + fmt("%.1f", elapsed) + " s"};
}

// ---- 5 ----------------------------------------------------------------------

Outcome coverage_simulation() {
  const auto t0 = std::chrono::steady_clock::now();
  const double eps = 0.2;
  const std::uint64_t m = required_m(UcfSpec::bernoulli_exact(), eps / 2, 0.05);
  const auto model = ModelSpec::bernoulli_mode();
  const auto gen = GeneratorSpec::bernoulli(0.3, m);
  const auto theta0 = true_risk_minimizer(gen, model).points.front();
  const int trials = 2000;
  int hits = 0;
  for (int k = 0; k < trials; ++k) {
    Stream s(derive_key(55, k));
    hits += AermSet(model, gen.draw(s), eps).contains(theta0);
  }
  const double freq = static_cast<double>(hits) / trials;
  const double elapsed = seconds_since(t0);
  return {freq >= 0.93 && elapsed < 60,
          "m " + std::to_string(m) + ", frequency " + fmt("%.4f", freq) + " in " + fmt("%.2f", elapsed) + " s"};
}

// ---- 6 ----------------------------------------------------------------------

double enumerated_plausibility(const std::vector<double>& y, double eps, double point) {
  const std::size_t m = y.size();
  std::size_t total = 1;
  for (std::size_t i = 0; i < m; ++i) total *= m;
  std::size_t hits = 0;
  for (std::size_t code = 0; code < total; ++code) {
    std::size_t c = code;
    double ones = 0;
    for (std::size_t i = 0; i < m; ++i, c /= m) ones += y[c % m];
    const double r0 = ones / m, r1 = 1 - ones / m;
    hits += (point == 0 ? r0 : r1) <= std::min(r0, r1) + eps + 1e-9;
  }
  return static_cast<double>(hits) / static_cast<double>(total);
}

Outcome bootstrap_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  struct Case {
    std::vector<double> y;
    double eps;
    double point;
  };
  const std::vector<Case> cases = {
      {{0, 1}, 0, 1},          {{1}, 0, 1},           {{0, 0, 1}, 0, 1},       {{0, 1, 1}, 0.2, 0},
      {{1, 0, 1, 1}, 0, 0},    {{0, 1, 0, 1}, 0, 1},  {{1, 1, 0, 0, 1}, 0.2, 0}, {{0, 0, 0, 1, 1}, 0, 1},
      {{1, 0, 1, 0, 1, 1}, 0, 0}, {{0, 1, 0, 0, 1, 1}, 0.1, 1}, {{1, 1, 1, 1, 1, 0}, 0.4, 0}};
  const std::uint64_t B = 200000;
  bool ok = true;
  double worst_z = 0;
  double two_point = 0;
  for (std::size_t k = 0; k < cases.size(); ++k) {
    const auto& c = cases[k];
    const double exact = enumerated_plausibility(c.y, c.eps, c.point);
    const double got = bootstrap_plausibility(ModelSpec::bernoulli_mode(), LabeledSample::labels_only(c.y), c.eps,
                                              ParamRegion::finite({{c.point}}), B, 900 + k)
                           .value;
    const double band = 3 * std::sqrt(exact * (1 - exact) / B);
    if (std::abs(got - exact) > band) ok = false;
    if (band > 0) worst_z = std::max(worst_z, std::abs(got - exact) / (band / 3));
    if (k == 0) {
      two_point = got;
      ok = ok && exact == 0.75;
    }
  }
  const double elapsed = seconds_since(t0);
  ok = ok && elapsed < 60;
  return {ok, std::to_string(cases.size()) + " samples, y=[0,1] region {1}: " + fmt("%.5f", two_point) +
                  " vs 0.75, largest |z| " + fmt("%.2f", worst_z) + " in " + fmt("%.1f", elapsed) + " s"};
}

// ---- 7 ----------------------------------------------------------------------

Outcome property_suites() {
  const auto t0 = std::chrono::steady_clock::now();
  const int status = std::system((std::string(PROPERTY_TESTS_PATH) + " --gtest_brief=1 > /dev/null 2>&1").c_str());
  const bool suites = status == 0;
  // Bit-identical experiment output under different worker counts.
  const auto dir = std::filesystem::temp_directory_path() / "aerm-acceptance-threads";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  const auto cfg = dir / "small.json";
  std::ofstream(cfg) << R"({"name": "lasso-plaus-curve", "p": 4, "t": 3, "m": 200, "replicates": 120, "seed": 8})";
  auto run = [&](const std::string& threads) {
    const auto out = dir / threads;
    const auto r = run_cli("experiment lasso-plaus-curve --config " + cfg.string() + " --out " + out.string(),
                           "AERM_THREADS=" + threads);
    std::ifstream in(out / "lasso-plaus-curve.csv");
    std::stringstream s;
    s << in.rdbuf();
    return r.exit_code == 0 ? s.str() : std::string();
  };
  const std::string one = run("1"), three = run("3"), eight = run("8");
  const bool identical = !one.empty() && one == three && one == eight;
  const double elapsed = seconds_since(t0);
  return {suites && identical, std::string("property_tests ") + (suites ? "green" : "red") +
                                   ", CLI output under AERM_THREADS=1,3,8 " + (identical ? "identical" : "differs") +
                                   " in " + fmt("%.1f", elapsed) + " s"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"type-I bound arithmetic", type1_bound_arithmetic},
      {"Bernstein replicate bound", bernstein_bound},
      {"lasso plausibility curve", lasso_curve},
      {"Bernoulli bootstrap coverage", bernoulli_coverage},
      {"almost-minimizer coverage", coverage_simulation},
      {"exhaustive bootstrap oracle", bootstrap_oracle},
      {"property suites", property_suites},
  };
  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    failures += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " " << (k + 1) << " " << criteria[k].first << ": " << o.detail
              << std::endl;
  }
  return failures;
}
