#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "visolve/core.hpp"
#include "visolve/problems.hpp"
#include "visolve/solvers.hpp"

namespace visolve {

using nlohmann::json;

/// Stepsize specification: an absolute number, or the symbolic forms "c/L"
/// (resolved against the problem's best known Lipschitz bound) and "c/Lref"
/// (resolved against its documented reference constant).
struct LambdaSpec {
  double scale = 0.0;
  enum class Denom { None, L, Lref } denom = Denom::None;

  static LambdaSpec absolute(double v) { return {v, Denom::None}; }

  static LambdaSpec parse(const std::string& text) {
    const auto slash = text.find('/');
    if (slash == std::string::npos)
      return absolute(detail_parse_number(text));
    const std::string num = text.substr(0, slash);
    const std::string den = text.substr(slash + 1);
    LambdaSpec s;
    s.scale = detail_parse_number(num);
    if (den == "L")
      s.denom = Denom::L;
    else if (den == "Lref")
      s.denom = Denom::Lref;
    else
      throw std::invalid_argument("lambda: unknown denominator '" + den + "' (use L or Lref)");
    return s;
  }

  double resolve(const ProblemInstance& p) const {
    switch (denom) {
      case Denom::None:
        return scale;
      case Denom::L:
        return scale / p.lipschitz();
      case Denom::Lref:
        require(p.lipschitz_ref.has_value(),
                "lambda: problem '" + p.name + "' has no reference Lipschitz constant");
        return scale / *p.lipschitz_ref;
    }
    return scale;
  }

  std::string text() const {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.17g", scale);
    switch (denom) {
      case Denom::None: return buf;
      case Denom::L: return std::string(buf) + "/L";
      case Denom::Lref: return std::string(buf) + "/Lref";
    }
    return buf;
  }

 private:
  static double detail_parse_number(const std::string& t) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
      v = std::stod(t, &pos);
    } catch (const std::exception&) {
      throw std::invalid_argument("lambda: bad number '" + t + "'");
    }
    if (pos != t.size()) throw std::invalid_argument("lambda: bad number '" + t + "'");
    require(v > 0.0, "lambda: must be positive");
    return v;
  }
};

struct RunSpec {
  std::string problem;
  std::string method = "fbf";
  std::string lambda_mode = "fixed";  // "fixed" | "adaptive"
  LambdaSpec lambda = LambdaSpec::absolute(0.1);  // fixed value, or lambda0 when adaptive
  double mu = 0.9;
  std::vector<double> rho{1.0};
  std::optional<Vec> x0;  // defaults to the problem's canonical start
  long max_iter = 100000;
  std::string stop_type = "dist_ref";  // "residual" | "dist_ref" | "exact"
  double stop_tol = 1e-6;
  std::uint64_t seed = 0;
  bool allow_unsafe_lambda = false;
  std::string output = "run";
  std::string emit = "both";  // "csv" | "json" | "both"
};

namespace detail {

inline void reject_unknown(const json& j, const std::set<std::string>& known,
                           const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!known.count(it.key()))
      throw std::invalid_argument("runspec: unknown field '" + it.key() + "' in " + where);
}

inline Method parse_method(const std::string& m) {
  if (m == "fbf") return Method::Fbf;
  if (m == "extragradient") return Method::Extragradient;
  if (m == "subgradient_extragradient") return Method::SubgradientExtragradient;
  if (m == "projected_gradient") return Method::ProjectedGradient;
  throw std::invalid_argument("runspec: unknown method '" + m + "'");
}

}  // namespace detail

inline RunSpec parse_runspec(const json& j) {
  detail::reject_unknown(j, {"problem", "solver", "output", "emit"}, "top level");
  RunSpec rs;
  require(j.contains("problem") && j["problem"].is_string(), "runspec: missing problem name");
  rs.problem = j["problem"].get<std::string>();
  if (j.contains("output")) rs.output = j["output"].get<std::string>();
  if (j.contains("emit")) {
    rs.emit = j["emit"].get<std::string>();
    require(rs.emit == "csv" || rs.emit == "json" || rs.emit == "both",
            "runspec: emit must be csv, json or both");
  }
  if (!j.contains("solver")) return rs;
  const json& s = j["solver"];
  detail::reject_unknown(s,
                         {"method", "lambda", "lambda_mode", "mu", "rho", "x0", "max_iter",
                          "stop", "seed", "allow_unsafe_lambda"},
                         "solver");
  if (s.contains("method")) rs.method = s["method"].get<std::string>();
  detail::parse_method(rs.method);  // early validation
  if (s.contains("lambda_mode")) {
    rs.lambda_mode = s["lambda_mode"].get<std::string>();
    require(rs.lambda_mode == "fixed" || rs.lambda_mode == "adaptive",
            "runspec: lambda_mode must be fixed or adaptive");
  }
  if (s.contains("lambda")) {
    if (s["lambda"].is_number())
      rs.lambda = LambdaSpec::absolute(s["lambda"].get<double>());
    else if (s["lambda"].is_string())
      rs.lambda = LambdaSpec::parse(s["lambda"].get<std::string>());
    else
      throw std::invalid_argument("runspec: lambda must be a number or a 'c/L' string");
  }
  if (s.contains("mu")) rs.mu = s["mu"].get<double>();
  if (s.contains("rho")) {
    if (s["rho"].is_number()) {
      rs.rho = {s["rho"].get<double>()};
    } else if (s["rho"].is_array()) {
      rs.rho = s["rho"].get<std::vector<double>>();
      require(!rs.rho.empty(), "runspec: empty rho list");
    } else {
      throw std::invalid_argument("runspec: rho must be a number or an array");
    }
  }
  if (s.contains("x0")) {
    const auto vals = s["x0"].get<std::vector<double>>();
    Vec v(static_cast<Eigen::Index>(vals.size()));
    for (std::size_t i = 0; i < vals.size(); ++i) v[static_cast<Eigen::Index>(i)] = vals[i];
    check_finite(v, "runspec x0");
    rs.x0 = v;
  }
  if (s.contains("max_iter")) rs.max_iter = s["max_iter"].get<long>();
  if (s.contains("stop")) {
    const json& st = s["stop"];
    detail::reject_unknown(st, {"type", "tol"}, "stop");
    if (st.contains("type")) rs.stop_type = st["type"].get<std::string>();
    require(rs.stop_type == "residual" || rs.stop_type == "dist_ref" || rs.stop_type == "exact",
            "runspec: stop type must be residual, dist_ref or exact");
    if (st.contains("tol")) rs.stop_tol = st["tol"].get<double>();
  }
  if (s.contains("seed")) rs.seed = s["seed"].get<std::uint64_t>();
  if (s.contains("allow_unsafe_lambda"))
    rs.allow_unsafe_lambda = s["allow_unsafe_lambda"].get<bool>();
  return rs;
}

inline json to_json(const RunSpec& rs) {
  json s;
  s["method"] = rs.method;
  s["lambda_mode"] = rs.lambda_mode;
  if (rs.lambda.denom == LambdaSpec::Denom::None)
    s["lambda"] = rs.lambda.scale;
  else
    s["lambda"] = rs.lambda.text();
  if (rs.lambda_mode == "adaptive") s["mu"] = rs.mu;
  if (rs.rho.size() == 1)
    s["rho"] = rs.rho.front();
  else
    s["rho"] = rs.rho;
  if (rs.x0) {
    std::vector<double> v(rs.x0->data(), rs.x0->data() + rs.x0->size());
    s["x0"] = v;
  }
  s["max_iter"] = rs.max_iter;
  s["stop"] = json{{"type", rs.stop_type}, {"tol", rs.stop_tol}};
  s["seed"] = rs.seed;
  if (rs.allow_unsafe_lambda) s["allow_unsafe_lambda"] = true;
  return json{{"problem", rs.problem}, {"solver", s}, {"output", rs.output}, {"emit", rs.emit}};
}

/// Resolves a RunSpec against the registry into an executable SolverConfig.
inline SolverConfig build_config(const RunSpec& rs, const ProblemInstance& p) {
  SolverConfig cfg;
  cfg.method = detail::parse_method(rs.method);
  const double lam = rs.lambda.resolve(p);
  cfg.lambda_mode = rs.lambda_mode == "adaptive" ? LambdaMode::adapt(lam, rs.mu)
                                                 : LambdaMode::fixed(lam);
  cfg.rho = rs.rho.size() == 1 ? RhoSchedule::constant(rs.rho.front())
                               : RhoSchedule::sequence(rs.rho);
  cfg.x0 = rs.x0 ? *rs.x0 : p.x0;
  cfg.max_iter = rs.max_iter;
  if (rs.stop_type == "residual")
    cfg.stop = StopRule::residual_below(rs.stop_tol);
  else if (rs.stop_type == "dist_ref")
    cfg.stop = StopRule::dist_to_ref_below(rs.stop_tol);
  else
    cfg.stop = StopRule::exact_termination();
  cfg.x_ref = p.x_ref;
  if (rs.stop_type == "dist_ref")
    require(p.x_ref.has_value(),
            "runspec: problem '" + p.name + "' has no reference solution for a dist_ref stop");
  cfg.seed = rs.seed;
  // validate the stepsize against the constant it was resolved from
  if (rs.lambda.denom == LambdaSpec::Denom::Lref)
    cfg.lipschitz = *p.lipschitz_ref;
  else
    cfg.lipschitz = p.lipschitz();
  cfg.allow_unsafe_lambda = rs.allow_unsafe_lambda;
  return cfg;
}

}  // namespace visolve
