// aermctl: command-line front end for almost-ERM confidence sets,
// plausibility estimates and tests.

#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "aerm/aerm.hpp"
#include "aerm/io.hpp"

namespace {

using aerm::io::Json;

void emit(const Json& j, const std::string& out_path) {
  const std::string text = aerm::io::dump17(j);
  std::cout << text;
  if (!out_path.empty()) {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw aerm::ConfigurationError("cannot write " + out_path);
    out << text;
  }
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw aerm::ConfigurationError("cannot write " + path);
  out << text;
}

struct TolOptions {
  std::optional<double> eps;
  std::optional<double> alpha;
  std::string ucf_path;
};

double resolve_eps(const TolOptions& t, std::uint64_t m) {
  if (t.eps && t.alpha) throw aerm::ConfigurationError("give either --eps or --alpha, not both");
  if (t.eps) return *t.eps;
  if (!t.alpha) throw aerm::ConfigurationError("one of --eps or --alpha is required");
  if (t.ucf_path.empty()) throw aerm::ConfigurationError("--alpha needs --ucf to derive the tolerance");
  return aerm::validity_tolerance(aerm::io::ucf_from_json(aerm::io::read_json_file(t.ucf_path)), m, *t.alpha);
}

void add_tol(CLI::App* cmd, TolOptions& t) {
  cmd->add_option("--eps", t.eps, "Tolerance of the almost-minimizer sets");
  cmd->add_option("--alpha", t.alpha, "Level; the tolerance becomes validity_tolerance(ucf, m, alpha)");
  cmd->add_option("--ucf", t.ucf_path, "Uniform convergence function (JSON)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Almost-ERM confidence sets and bootstrapped plausibility"};
  app.require_subcommand(1);

  std::string model_path, sample_path, ucf_path, region_path, generator_path, out_path, dump_path, config_path;
  std::uint64_t replicates = 1000, seed = 1, B = 0;
  double alpha = 0.05, gamma = 0.025;
  std::optional<double> delta, eps_opt;
  std::optional<std::uint64_t> m_opt;
  bool belief = false;
  std::string mode = "level-first", method = "aerm", experiment_name;
  TolOptions tol;

  auto* confset = app.add_subcommand("confset", "Almost-minimizer confidence set of a sample");
  confset->add_option("--model", model_path, "Model (JSON)")->required();
  confset->add_option("--sample", sample_path, "Sample (CSV: x_1..x_p,y)")->required();
  confset->add_option("--ucf", ucf_path, "Uniform convergence function (JSON)")->required();
  confset->add_option("--alpha", alpha, "Level")->required();
  confset->add_option("--delta", delta, "Cover the delta-neighborhood of minimal risk");
  confset->add_option("--out", out_path, "Also write the JSON here");

  auto* pl = app.add_subcommand("pl", "Plausibility of a region");
  pl->require_subcommand(1);
  auto* boot = pl->add_subcommand("boot", "Bootstrap estimate from a sample");
  boot->add_option("--model", model_path)->required();
  boot->add_option("--sample", sample_path)->required();
  boot->add_option("--region", region_path)->required();
  add_tol(boot, tol);
  boot->add_option("--replicates", replicates, "Bootstrap resamples B");
  boot->add_option("--seed", seed);
  boot->add_flag("--belief", belief, "Estimate belief instead of plausibility");
  boot->add_option("--dump-replicates", dump_path, "Per-replicate CSV");
  boot->add_option("--out", out_path);
  auto* mc = pl->add_subcommand("mc", "Monte Carlo estimate from a generator");
  mc->add_option("--generator", generator_path)->required();
  mc->add_option("--model", model_path)->required();
  mc->add_option("--region", region_path)->required();
  add_tol(mc, tol);
  mc->add_option("--replicates", replicates);
  mc->add_option("--seed", seed);
  mc->add_option("--dump-replicates", dump_path);
  mc->add_option("--out", out_path);

  auto* test = app.add_subcommand("test", "Bootstrap test of theta0 in region");
  test->add_option("--mode", mode)->check(CLI::IsMember({"level-first", "tolerance-first"}));
  test->add_option("--alpha", alpha)->required();
  test->add_option("--gamma", gamma)->required();
  test->add_option("--B", B)->required();
  test->add_option("--model", model_path)->required();
  test->add_option("--sample", sample_path)->required();
  test->add_option("--region", region_path)->required();
  test->add_option("--ucf", ucf_path)->required();
  test->add_option("--seed", seed);
  test->add_option("--dump-replicates", dump_path);
  test->add_option("--out", out_path);

  auto* conf = app.add_subcommand("conf", "Confidence assigned to a region");
  conf->add_option("--model", model_path)->required();
  conf->add_option("--sample", sample_path)->required();
  conf->add_option("--ucf", ucf_path)->required();
  conf->add_option("--region", region_path)->required();
  conf->add_option("--method", method)->check(CLI::IsMember({"aerm", "boot"}));
  conf->add_option("--replicates", replicates);
  conf->add_option("--seed", seed);
  conf->add_option("--out", out_path);

  auto* ucf = app.add_subcommand("ucf", "Sample size or tolerance of a uniform convergence function");
  ucf->add_option("--ucf", ucf_path)->required();
  ucf->add_option("--alpha", alpha)->required();
  ucf->add_option("--eps", eps_opt, "Report required_m at this tolerance");
  ucf->add_option("--m", m_opt, "Report the tolerances at this sample size");

  auto* experiment = app.add_subcommand("experiment", "Run a configured experiment");
  experiment->add_option("name", experiment_name)
      ->required()
      ->check(CLI::IsMember({"lasso-plaus-curve", "bernoulli-coverage", "quantile-demo"}));
  experiment->add_option("--config", config_path)->required();
  experiment->add_option("--out", out_path, "Output directory")->required();

  auto* minb = app.add_subcommand("minb", "Bernstein replicate bound for gamma");
  minb->add_option("--gamma", gamma)->required();

  auto* bound = app.add_subcommand("bound", "Smallest type-I bound of the tolerance-first test");
  bound->add_option("--B", B)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*confset) {
      const auto model = aerm::io::model_from_json(aerm::io::read_json_file(model_path));
      const auto sample = aerm::read_sample_csv(sample_path);
      const auto u = aerm::io::ucf_from_json(aerm::io::read_json_file(ucf_path));
      const auto target = delta ? aerm::Target::neighborhood(*delta) : aerm::Target::point_minimizer();
      const auto [set, report] = aerm::confidence_set(model, sample, u, alpha, target);
      Json j = aerm::io::to_json(report);
      j["erm"] = {{"theta", set.surface().erm().theta}, {"min_risk", set.min_risk()}};
      emit(j, out_path);
    } else if (*boot) {
      const auto model = aerm::io::model_from_json(aerm::io::read_json_file(model_path));
      const auto sample = aerm::read_sample_csv(sample_path);
      const auto region = aerm::io::region_from_json(aerm::io::read_json_file(region_path));
      const double eps = resolve_eps(tol, sample.size());
      if (belief) {
        if (!dump_path.empty()) throw aerm::ConfigurationError("--dump-replicates is not available with --belief");
        Json j = aerm::io::to_json(aerm::bootstrap_belief(model, sample, eps, region, replicates, seed));
        j["quantity"] = "belief";
        emit(j, out_path);
      } else {
        const auto table = aerm::bootstrap_excess(model, sample, {region}, replicates, seed);
        if (!dump_path.empty()) write_file(dump_path, aerm::io::replicates_csv(table, 0, eps));
        Json j = aerm::io::to_json(aerm::plausibility_from_excess(table, 0, eps, aerm::Method::bootstrap, seed));
        j["quantity"] = "plausibility";
        emit(j, out_path);
      }
    } else if (*mc) {
      const auto gen = aerm::io::generator_from_json(aerm::io::read_json_file(generator_path));
      const auto model = aerm::io::model_from_json(aerm::io::read_json_file(model_path));
      const auto region = aerm::io::region_from_json(aerm::io::read_json_file(region_path));
      const double eps = resolve_eps(tol, gen.m);
      const auto table = aerm::monte_carlo_excess(gen, model, {region}, replicates, seed);
      if (!dump_path.empty()) write_file(dump_path, aerm::io::replicates_csv(table, 0, eps));
      Json j = aerm::io::to_json(aerm::plausibility_from_excess(table, 0, eps, aerm::Method::monte_carlo, seed));
      j["quantity"] = "plausibility";
      emit(j, out_path);
    } else if (*test) {
      const auto model = aerm::io::model_from_json(aerm::io::read_json_file(model_path));
      const auto sample = aerm::read_sample_csv(sample_path);
      aerm::TestConfig cfg;
      cfg.alpha = alpha;
      cfg.gamma = gamma;
      cfg.B = B;
      cfg.mode = mode == "level-first" ? aerm::TestConfig::Mode::level_first : aerm::TestConfig::Mode::tolerance_first;
      cfg.region = aerm::io::region_from_json(aerm::io::read_json_file(region_path));
      cfg.ucf = aerm::io::ucf_from_json(aerm::io::read_json_file(ucf_path));
      const auto result = cfg.mode == aerm::TestConfig::Mode::level_first
                              ? aerm::test_level_first(model, sample, cfg, seed)
                              : aerm::test_tolerance_first(model, sample, cfg, seed);
      if (!dump_path.empty()) {
        const auto table = aerm::bootstrap_excess(model, sample, {cfg.region}, cfg.B, seed);
        write_file(dump_path, aerm::io::replicates_csv(table, 0, result.eps_used));
      }
      Json j;
      j["mode"] = aerm::to_string(cfg.mode);
      j["alpha"] = alpha;
      j["gamma"] = gamma;
      j["B"] = B;
      const Json body = aerm::io::to_json(result);
      for (auto it = body.begin(); it != body.end(); ++it) j[it.key()] = it.value();
      emit(j, out_path);
    } else if (*conf) {
      const auto model = aerm::io::model_from_json(aerm::io::read_json_file(model_path));
      const auto sample = aerm::read_sample_csv(sample_path);
      const auto u = aerm::io::ucf_from_json(aerm::io::read_json_file(ucf_path));
      const auto region = aerm::io::region_from_json(aerm::io::read_json_file(region_path));
      Json j;
      j["method"] = method;
      if (method == "aerm") {
        j["conf"] = aerm::conf_of_region_aerm(model, sample, u, region);
        j["coverage_boundary_alpha"] = aerm::aerm_coverage_boundary(model, sample, u, region);
      } else {
        j["conf"] = aerm::conf_of_region_boot(model, sample, u, region, replicates, seed);
        j["replicates"] = replicates;
        j["seed"] = seed;
      }
      emit(j, out_path);
    } else if (*ucf) {
      const auto u = aerm::io::ucf_from_json(aerm::io::read_json_file(ucf_path));
      if (!eps_opt && !m_opt) throw aerm::ConfigurationError("give --eps and/or --m");
      Json j;
      j["ucf"] = aerm::io::to_json(u);
      j["alpha"] = alpha;
      if (eps_opt) {
        j["eps"] = *eps_opt;
        j["required_m"] = aerm::required_m(u, *eps_opt, alpha);
      }
      if (m_opt) {
        j["m"] = *m_opt;
        j["coverage_tolerance"] = aerm::coverage_tolerance(u, *m_opt, alpha);
        j["validity_tolerance"] = aerm::validity_tolerance(u, *m_opt, alpha);
      }
      emit(j, "");
    } else if (*experiment) {
      const Json cfg = aerm::io::read_json_file(config_path);
      std::filesystem::create_directories(out_path);
      const std::filesystem::path dir(out_path);
      Json j;
      std::string csv;
      if (experiment_name == "lasso-plaus-curve") {
        const auto r = aerm::run_lasso_plaus_curve(aerm::io::lasso_curve_config_from_json(cfg));
        j = aerm::io::to_json(r);
        csv = aerm::io::to_csv(r);
      } else if (experiment_name == "bernoulli-coverage") {
        const auto r = aerm::run_bernoulli_coverage(aerm::io::bernoulli_coverage_config_from_json(cfg));
        j = aerm::io::to_json(r);
        csv = aerm::io::to_csv(r);
      } else {
        const auto r = aerm::run_quantile_demo(aerm::io::quantile_demo_config_from_json(cfg));
        j = aerm::io::to_json(r);
        csv = aerm::io::to_csv(r);
      }
      write_file((dir / (experiment_name + ".csv")).string(), csv);
      emit(j, (dir / (experiment_name + ".json")).string());
    } else if (*minb) {
      emit({{"gamma", gamma}, {"B", aerm::bernstein_min_B(gamma)}}, "");
    } else if (*bound) {
      Json j{{"B", B}};
      const Json body = aerm::io::to_json(aerm::optimal_type1_bound(B));
      for (auto it = body.begin(); it != body.end(); ++it) j[it.key()] = it.value();
      emit(j, "");
    }
  } catch (const aerm::ConvergenceError& e) {
    std::cerr << "aermctl: " << e.what() << "\n";
    return 3;
  } catch (const aerm::ResourceError& e) {
    std::cerr << "aermctl: " << e.what() << "\n";
    return 3;
  } catch (const aerm::Error& e) {
    std::cerr << "aermctl: " << e.what() << "\n";
    return 2;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "aermctl: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
