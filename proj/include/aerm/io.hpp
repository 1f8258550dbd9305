#pragma once

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "aerm/confidence.hpp"
#include "aerm/error.hpp"
#include "aerm/experiments.hpp"
#include "aerm/generators.hpp"
#include "aerm/model.hpp"
#include "aerm/plausibility.hpp"
#include "aerm/ucf.hpp"

namespace aerm::io {

using Json = nlohmann::ordered_json;

/// %.17g, enough digits to round-trip a double.
inline std::string format17(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace detail {

inline void indent(std::ostream& out, int depth) {
  for (int i = 0; i < depth; ++i) out << "  ";
}

inline void dump(const Json& j, std::ostream& out, int depth) {
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out << "{}";
        return;
      }
      out << "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out << ",\n";
        first = false;
        indent(out, depth + 1);
        out << Json(it.key()).dump() << ": ";
        dump(it.value(), out, depth + 1);
      }
      out << "\n";
      indent(out, depth);
      out << "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out << "[]";
        return;
      }
      // Numeric arrays stay on one line.
      const bool flat = std::all_of(j.begin(), j.end(), [](const Json& e) { return e.is_primitive(); });
      out << "[";
      bool first = true;
      for (const auto& e : j) {
        if (!first) out << (flat ? ", " : ",");
        first = false;
        if (!flat) {
          out << "\n";
          indent(out, depth + 1);
        }
        dump(e, out, depth + 1);
      }
      if (!flat) {
        out << "\n";
        indent(out, depth);
      }
      out << "]";
      return;
    }
    case Json::value_t::number_float: out << format17(j.get<double>()); return;
    default: out << j.dump(); return;
  }
}

}  // namespace detail

/// Pretty JSON with every float at 17 significant digits.
inline std::string dump17(const Json& j) {
  std::ostringstream out;
  detail::dump(j, out, 0);
  out << "\n";
  return out.str();
}

// ---- reading ----------------------------------------------------------------

inline Json parse_json_text(const std::string& text, const std::string& what) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ConfigurationError("malformed JSON in " + what + ": " + e.what());
  }
}

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigurationError("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_json_text(buf.str(), path);
}

namespace detail {

inline void check_keys(const Json& j, const std::string& what, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigurationError(what + " must be a JSON object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!ok.count(it.key())) throw ConfigurationError("unknown key '" + it.key() + "' in " + what);
  }
}

template <class T>
T get(const Json& j, const char* key, const std::string& what) {
  if (!j.contains(key)) throw ConfigurationError(what + " is missing '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception&) {
    throw ConfigurationError(what + ": '" + key + "' has the wrong type");
  }
}

template <class T>
T get_or(const Json& j, const char* key, T fallback, const std::string& what) {
  return j.contains(key) ? get<T>(j, key, what) : fallback;
}

inline std::uint64_t get_count(const Json& j, const char* key, const std::string& what) {
  const Json& v = j.at(key);
  if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
    throw ConfigurationError(what + ": '" + key + "' must be a nonnegative integer");
  }
  return v.get<std::uint64_t>();
}

inline std::uint64_t get_count_or(const Json& j, const char* key, std::uint64_t fallback, const std::string& what) {
  return j.contains(key) ? get_count(j, key, what) : fallback;
}

}  // namespace detail

inline ParamSpace param_space_from_json(const Json& j) {
  const std::string what = "param_space";
  detail::check_keys(j, what, {"kind", "points", "lo", "hi", "radius", "dim"});
  const auto kind = detail::get<std::string>(j, "kind", what);
  if (kind == "finite") return ParamSpace::finite(detail::get<std::vector<Vector>>(j, "points", what));
  if (kind == "interval") {
    return ParamSpace::interval(detail::get<Vector>(j, "lo", what), detail::get<Vector>(j, "hi", what));
  }
  if (kind == "l1-ball") {
    return ParamSpace::l1_ball(detail::get<double>(j, "radius", what), detail::get_count(j, "dim", what));
  }
  throw ConfigurationError("unknown param_space kind '" + kind + "'");
}

inline Loss loss_from_json(const Json& j) {
  const std::string what = "loss";
  if (j.is_string()) {
    const auto name = j.get<std::string>();
    if (name == "zero-one") return Loss::zero_one();
    if (name == "squared") return Loss::squared();
    if (name == "absolute") return Loss::absolute();
    if (name == "pinball") throw ConfigurationError("pinball loss needs tau: use {\"kind\": \"pinball\", \"tau\": t}");
    throw ConfigurationError("unknown loss '" + name + "'");
  }
  detail::check_keys(j, what, {"kind", "tau"});
  const auto kind = detail::get<std::string>(j, "kind", what);
  if (kind == "pinball") return Loss::pinball(detail::get<double>(j, "tau", what));
  return loss_from_json(Json(kind));
}

/// {"family": ..., optional "loss", "param_space", and family shorthands
/// "radius"/"dim" (l1-linear) or "tau"/"lo"/"hi" (constant-quantile)}.
inline ModelSpec model_from_json(const Json& j) {
  const std::string what = "model";
  detail::check_keys(j, what, {"family", "loss", "param_space", "radius", "dim", "tau", "lo", "hi"});
  const auto family = detail::get<std::string>(j, "family", what);
  if (family == "bernoulli-mode") {
    const Loss loss = j.contains("loss") ? loss_from_json(j.at("loss")) : Loss::zero_one();
    const ParamSpace space =
        j.contains("param_space") ? param_space_from_json(j.at("param_space")) : ParamSpace::finite({{0.0}, {1.0}});
    return {Family::bernoulli_mode, loss, space};
  }
  if (family == "l1-linear") {
    const Loss loss = j.contains("loss") ? loss_from_json(j.at("loss")) : Loss::squared();
    if (j.contains("param_space")) return {Family::l1_linear, loss, param_space_from_json(j.at("param_space"))};
    return {Family::l1_linear, loss,
            ParamSpace::l1_ball(detail::get<double>(j, "radius", what), detail::get_count(j, "dim", what))};
  }
  if (family == "constant-quantile") {
    const Loss loss =
        j.contains("loss") ? loss_from_json(j.at("loss")) : Loss::pinball(detail::get<double>(j, "tau", what));
    if (j.contains("param_space")) return {Family::constant_quantile, loss, param_space_from_json(j.at("param_space"))};
    return {Family::constant_quantile, loss,
            ParamSpace::interval({detail::get<double>(j, "lo", what)}, {detail::get<double>(j, "hi", what)})};
  }
  throw ConfigurationError("unknown family '" + family + "'");
}

inline ParamRegion region_from_json(const Json& j) {
  const std::string what = "region";
  detail::check_keys(j, what, {"kind", "points", "lo", "hi", "radius", "of", "parts"});
  const auto kind = detail::get<std::string>(j, "kind", what);
  if (kind == "finite") return ParamRegion::finite(detail::get<std::vector<Vector>>(j, "points", what));
  if (kind == "box") return ParamRegion::box(detail::get<Vector>(j, "lo", what), detail::get<Vector>(j, "hi", what));
  if (kind == "l1-ball") return ParamRegion::l1_ball(detail::get<double>(j, "radius", what));
  if (kind == "complement") {
    if (!j.contains("of")) throw ConfigurationError("complement region is missing 'of'");
    return ParamRegion::complement(region_from_json(j.at("of")));
  }
  if (kind == "union") {
    if (!j.contains("parts") || !j.at("parts").is_array()) throw ConfigurationError("union region needs 'parts'");
    std::vector<ParamRegion> parts;
    for (const auto& p : j.at("parts")) parts.push_back(region_from_json(p));
    return ParamRegion::union_of(std::move(parts));
  }
  throw ConfigurationError("unknown region kind '" + kind + "'");
}

inline UcfSpec ucf_from_json(const Json& j) {
  const std::string what = "ucf";
  detail::check_keys(j, what, {"kind", "V", "sigma2", "tau", "V_sup", "c", "M", "lambda", "sq_norm_sum"});
  const auto kind = detail::get<std::string>(j, "kind", what);
  if (kind == "bernoulli-exact") return UcfSpec::bernoulli_exact();
  if (kind == "chebyshev-variance") return UcfSpec::chebyshev_variance(detail::get<double>(j, "V", what));
  if (kind == "subexponential") return UcfSpec::subexponential(detail::get<double>(j, "sigma2", what));
  if (kind == "quantile-variance") {
    return UcfSpec::quantile_variance(detail::get<double>(j, "tau", what), detail::get<double>(j, "V_sup", what));
  }
  if (kind == "lasso-exponential") return UcfSpec::lasso_exponential(detail::get<double>(j, "c", what));
  if (kind == "rademacher") {
    return UcfSpec::rademacher(detail::get<double>(j, "M", what), detail::get<double>(j, "lambda", what),
                               detail::get<double>(j, "sq_norm_sum", what));
  }
  throw ConfigurationError("unknown ucf kind '" + kind + "'");
}

inline Law law_from_json(const Json& j) {
  const std::string what = "law";
  detail::check_keys(j, what, {"kind", "lo", "hi", "at", "mean", "sd", "rate"});
  const auto kind = detail::get<std::string>(j, "kind", what);
  if (kind == "uniform") return Law::uniform(detail::get<double>(j, "lo", what), detail::get<double>(j, "hi", what));
  if (kind == "point-mass") return Law::point_mass(detail::get<double>(j, "at", what));
  if (kind == "normal") return Law::normal(detail::get<double>(j, "mean", what), detail::get<double>(j, "sd", what));
  if (kind == "exponential") return Law::exponential(detail::get<double>(j, "rate", what));
  throw ConfigurationError("unknown law '" + kind + "'");
}

inline GeneratorSpec generator_from_json(const Json& j) {
  const std::string what = "generator";
  detail::check_keys(j, what, {"kind", "p", "beta0", "law", "m"});
  const auto kind = detail::get<std::string>(j, "kind", what);
  const std::uint64_t m = detail::get_count(j, "m", what);
  if (kind == "bernoulli") return GeneratorSpec::bernoulli(detail::get<double>(j, "p", what), m);
  if (kind == "lasso-linear") return GeneratorSpec::lasso_linear(detail::get<Vector>(j, "beta0", what), m);
  if (kind == "labeled-distribution") {
    if (!j.contains("law")) throw ConfigurationError("labeled-distribution generator needs 'law'");
    return GeneratorSpec::labeled_distribution(law_from_json(j.at("law")), m);
  }
  throw ConfigurationError("unknown generator kind '" + kind + "'");
}

inline void check_name(const Json& j, const std::string& expected) {
  if (j.contains("name") && j.at("name") != expected) {
    throw ConfigurationError("config is for experiment '" + j.at("name").dump() + "', not '" + expected + "'");
  }
}

inline LassoCurveConfig lasso_curve_config_from_json(const Json& j) {
  const std::string what = "lasso-plaus-curve config";
  detail::check_keys(j, what,
                     {"name", "p", "t", "m", "alpha", "replicates", "grid", "beta0", "norm", "tolerance", "seed"});
  check_name(j, "lasso-plaus-curve");
  LassoCurveConfig c;
  c.p = detail::get_count_or(j, "p", c.p, what);
  c.t = detail::get_or(j, "t", c.t, what);
  c.m = detail::get_count_or(j, "m", c.m, what);
  c.alpha = detail::get_or(j, "alpha", c.alpha, what);
  c.replicates = detail::get_count_or(j, "replicates", c.replicates, what);
  c.grid = detail::get_or(j, "grid", c.grid, what);
  if (j.contains("beta0")) c.beta0 = detail::get<Vector>(j, "beta0", what);
  const auto norm = detail::get_or<std::string>(j, "norm", "l2", what);
  if (norm != "l2" && norm != "l1") throw ConfigurationError("norm must be 'l2' or 'l1'");
  c.norm = norm == "l2" ? LassoCurveConfig::Norm::l2 : LassoCurveConfig::Norm::l1;
  const auto tol = detail::get_or<std::string>(j, "tolerance", "coverage", what);
  if (tol != "coverage" && tol != "validity") throw ConfigurationError("tolerance must be 'coverage' or 'validity'");
  c.tolerance = tol == "coverage" ? LassoCurveConfig::Tolerance::coverage : LassoCurveConfig::Tolerance::validity;
  c.seed = detail::get_count_or(j, "seed", c.seed, what);
  if (c.m < 1 || c.replicates < 1) throw ConfigurationError("m and replicates must be at least 1");
  return c;
}

inline BernoulliCoverageConfig bernoulli_coverage_config_from_json(const Json& j) {
  const std::string what = "bernoulli-coverage config";
  detail::check_keys(j, what, {"name", "p", "alpha", "gamma", "B", "trials", "grid", "seed"});
  check_name(j, "bernoulli-coverage");
  BernoulliCoverageConfig c;
  c.p = detail::get_or(j, "p", c.p, what);
  c.alpha = detail::get_or(j, "alpha", c.alpha, what);
  c.gamma = detail::get_or(j, "gamma", c.gamma, what);
  c.B = detail::get_count_or(j, "B", c.B, what);
  c.trials = detail::get_count_or(j, "trials", c.trials, what);
  c.grid = detail::get_or(j, "grid", c.grid, what);
  c.seed = detail::get_count_or(j, "seed", c.seed, what);
  for (auto m : c.grid) {
    if (m < 1) throw ConfigurationError("grid sample sizes must be at least 1");
  }
  return c;
}

inline QuantileDemoConfig quantile_demo_config_from_json(const Json& j) {
  const std::string what = "quantile-demo config";
  detail::check_keys(j, what, {"name", "law", "tau", "lo", "hi", "m", "alpha", "trials", "V_sup", "seed"});
  check_name(j, "quantile-demo");
  QuantileDemoConfig c;
  if (j.contains("law")) c.law = law_from_json(j.at("law"));
  c.tau = detail::get_or(j, "tau", c.tau, what);
  c.lo = detail::get_or(j, "lo", c.lo, what);
  c.hi = detail::get_or(j, "hi", c.hi, what);
  c.m = detail::get_count_or(j, "m", c.m, what);
  c.alpha = detail::get_or(j, "alpha", c.alpha, what);
  c.trials = detail::get_count_or(j, "trials", c.trials, what);
  if (j.contains("V_sup")) c.v_sup = detail::get<double>(j, "V_sup", what);
  c.seed = detail::get_count_or(j, "seed", c.seed, what);
  if (c.m < 1) throw ConfigurationError("m must be at least 1");
  return c;
}

// ---- writing ----------------------------------------------------------------

inline Json to_json(const UcfSpec& u) {
  Json j;
  j["kind"] = to_string(u.kind);
  switch (u.kind) {
    case UcfSpec::Kind::bernoulli_exact: break;
    case UcfSpec::Kind::chebyshev_variance: j["V"] = u.variance; break;
    case UcfSpec::Kind::subexponential: j["sigma2"] = u.sigma2; break;
    case UcfSpec::Kind::quantile_variance:
      j["tau"] = u.tau;
      j["V_sup"] = u.variance;
      break;
    case UcfSpec::Kind::lasso_exponential: j["c"] = u.c; break;
    case UcfSpec::Kind::rademacher:
      j["M"] = u.M;
      j["lambda"] = u.lambda;
      j["sq_norm_sum"] = u.sq_norm_sum;
      break;
  }
  return j;
}

inline Json to_json(const PlausibilityEstimate& e) {
  Json j;
  j["value"] = e.value;
  j["eps"] = e.eps;
  j["replicates"] = e.replicates;
  j["skipped_empty"] = e.skipped_empty;
  j["method"] = to_string(e.method);
  j["seed"] = e.seed;
  return j;
}

inline Json to_json(const TestResult& r) {
  Json j;
  j["plausibility"] = to_json(r.plausibility);
  j["threshold"] = r.threshold;
  j["reject"] = r.reject;
  j["type1_bound"] = r.type1_bound;
  j["eps_used"] = r.eps_used;
  return j;
}

inline Json to_json(const ConfidenceSetReport& r) {
  Json j;
  j["eps"] = r.eps;
  j["alpha"] = r.alpha;
  j["m"] = r.m;
  j["ucf_kind"] = to_string(r.ucf.kind);
  j["ucf"] = to_json(r.ucf);
  j["guarantee"] = r.target.kind == Target::Kind::point_minimizer ? "point-minimizer" : "neighborhood";
  if (r.target.kind == Target::Kind::neighborhood) j["delta"] = r.target.delta;
  if (r.ucf.kind == UcfSpec::Kind::bernoulli_exact) {
    j["premise_coverage"] = r.premise_coverage;
  } else {
    j["required_m"] = r.required_m;
  }
  return j;
}

inline Json to_json(const Type1Optimum& o) {
  Json j;
  j["alpha"] = o.alpha;
  j["gamma"] = o.gamma;
  j["bound"] = o.bound;
  return j;
}

inline Json to_json(const LassoCurve& c) {
  Json j;
  j["beta0"] = c.beta0;
  j["beta0_l1"] = c.beta0_l1;
  j["c"] = c.c;
  j["eps"] = c.eps;
  j["crossing"] = c.crossing ? Json(*c.crossing) : Json(nullptr);
  Json rows = Json::array();
  for (const auto& r : c.rows) rows.push_back({{"t_prime", r.t_prime}, {"plausibility", r.plausibility}, {"mc_error", r.mc_error}});
  j["rows"] = rows;
  return j;
}

inline Json to_json(const BernoulliCoverage& c) {
  Json j;
  j["m_star"] = c.m_star;
  j["B"] = c.B;
  Json rows = Json::array();
  for (const auto& r : c.rows) {
    rows.push_back({{"m", r.m}, {"eps", r.eps}, {"frequency", r.frequency}, {"mc_error", r.mc_error}});
  }
  j["rows"] = rows;
  return j;
}

inline Json to_json(const QuantileDemo& q) {
  Json j;
  j["true_quantile"] = q.true_quantile;
  j["V_sup"] = q.v_sup;
  j["eps"] = q.eps;
  j["coverage"] = q.coverage;
  j["trials"] = q.trials;
  return j;
}

/// CSV table of a curve; floats at 17 significant digits.
inline std::string to_csv(const LassoCurve& c) {
  std::string out = "t_prime,plausibility,mc_error\n";
  for (const auto& r : c.rows) out += format17(r.t_prime) + "," + format17(r.plausibility) + "," + format17(r.mc_error) + "\n";
  return out;
}

inline std::string to_csv(const BernoulliCoverage& c) {
  std::string out = "m,eps,frequency,mc_error,at_or_above_m_star\n";
  for (const auto& r : c.rows) {
    out += std::to_string(r.m) + "," + format17(r.eps) + "," + format17(r.frequency) + "," + format17(r.mc_error) +
           "," + (r.m >= c.m_star ? "1" : "0") + "\n";
  }
  return out;
}

inline std::string to_csv(const QuantileDemo& q) {
  return "true_quantile,V_sup,eps,coverage,trials\n" + format17(q.true_quantile) + "," + format17(q.v_sup) + "," +
         format17(q.eps) + "," + format17(q.coverage) + "," + std::to_string(q.trials) + "\n";
}

/// replicate,excess,indicator rows for one region column at tolerance eps.
inline std::string replicates_csv(const ExcessTable& t, std::size_t k, double eps) {
  std::string out = "replicate,excess,indicator\n";
  for (std::size_t r = 0; r < t.replicates(); ++r) {
    out += std::to_string(r) + "," + format17(t.at(r, k)) + "," + (t.at(r, k) <= eps + kTolOpt ? "1" : "0") + "\n";
  }
  return out;
}

}  // namespace aerm::io
