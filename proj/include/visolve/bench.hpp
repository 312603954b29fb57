#pragma once

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "visolve/diagnostics.hpp"
#include "visolve/flow.hpp"
#include "visolve/problems.hpp"
#include "visolve/runspec.hpp"
#include "visolve/solvers.hpp"
#include "visolve/trace_io.hpp"

namespace visolve {

namespace detail {

inline void ensure_parent_dir(const std::string& prefix) {
  const auto parent = std::filesystem::path(prefix).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
}

inline std::string fmt_short(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

inline int exit_code_for(Status st) {
  switch (st) {
    case Status::SolvedExact:
    case Status::TolReached:
      return 0;
    case Status::MaxIter:
      return 2;
    case Status::Diverged:
      return 3;
    case Status::Running:
      return 2;
  }
  return 2;
}

}  // namespace detail

inline json report_to_json(const RunReport& r) {
  return json{{"iterations", r.iterations},
              {"final_residual", r.final_residual},
              {"final_dist_ref", r.final_dist_ref},
              {"total_f_evals", r.total_f_evals},
              {"total_proj_calls", r.total_proj_calls},
              {"wall_ns", r.wall_ns},
              {"empty_trace", r.empty_trace}};
}

inline json constants_json(const ProblemInstance& p, double lambda_resolved, std::uint64_t seed) {
  json c{{"lambda", lambda_resolved},
         {"lipschitz", p.lipschitz()},
         {"lipschitz_est", p.lipschitz_est},
         {"gamma_hat", p.gamma_hat},
         {"seed", seed},
         {"analysis_seed", p.seed},
         {"analysis_samples", p.samples}};
  if (p.lipschitz_ref)
    c["lipschitz_ref"] = *p.lipschitz_ref;
  else
    c["lipschitz_ref"] = nullptr;
  return c;
}

struct RunArtifacts {
  SolveResult result;
  RunReport report;
  json report_json;
  std::string trace_csv;
  int exit_code = 0;
};

/// Runs one RunSpec and assembles its artifacts without touching the
/// filesystem; cmd_solve persists them.
inline RunArtifacts execute(const RunSpec& rs) {
  const ProblemInstance& p = find_problem(rs.problem);
  SolverConfig cfg = build_config(rs, p);
  RunArtifacts art;
  art.result = solve(cfg, p.op, p.set);
  art.report = summarize(art.result.trace);
  art.trace_csv = trace_to_csv(art.result.trace);
  std::vector<double> xfin(art.result.x_final.data(),
                           art.result.x_final.data() + art.result.x_final.size());
  art.report_json = json{
      {"problem", rs.problem},
      {"method", rs.method},
      {"status", to_string(art.result.status)},
      {"report", report_to_json(art.report)},
      {"x_final", xfin},
      {"constants", constants_json(p, cfg.lambda_mode.lambda, cfg.seed)},
      {"stop",
       json{{"type", rs.stop_type},
            {"tol", rs.stop_tol},
            {"note", "dist_ref is measured against the registry reference solution"}}},
      {"runspec", to_json(rs)}};
  art.exit_code = detail::exit_code_for(art.result.status);
  return art;
}

inline void persist(const RunArtifacts& art, const std::string& prefix, const std::string& emit) {
  detail::ensure_parent_dir(prefix);
  if (emit == "csv" || emit == "both") write_file(prefix + "_trace.csv", art.trace_csv);
  if (emit == "json" || emit == "both")
    write_file(prefix + "_report.json", art.report_json.dump(2) + "\n");
}

/// solve subcommand: one run, artifacts <output>_trace.csv / _report.json.
inline int cmd_solve(const RunSpec& rs) {
  RunArtifacts art = execute(rs);
  persist(art, rs.output, rs.emit);
  return art.exit_code;
}

/// sweep-rho subcommand: one run per relaxation value (ascending), plus a
/// summary table CSV (rho, iterations, wall_ns).
inline int cmd_sweep_rho(const std::string& problem, std::vector<double> rhos,
                         const LambdaSpec& lambda, double tol, long max_iter,
                         const std::string& prefix, const std::string& emit = "both") {
  require(!rhos.empty(), "sweep-rho: empty rho list");
  std::sort(rhos.begin(), rhos.end());
  detail::ensure_parent_dir(prefix);
  std::string summary = "rho,iterations,wall_ns\n";
  int worst = 0;
  for (double rho : rhos) {
    RunSpec rs;
    rs.problem = problem;
    rs.method = "fbf";
    rs.lambda = lambda;
    rs.rho = {rho};
    rs.max_iter = max_iter;
    rs.stop_type = "dist_ref";
    rs.stop_tol = tol;
    rs.output = prefix + "_rho" + detail::fmt_short(rho);
    rs.emit = emit;
    RunArtifacts art = execute(rs);
    persist(art, rs.output, rs.emit);
    summary += detail::fmt_short(rho) + "," + std::to_string(art.report.iterations) + "," +
               std::to_string(art.report.wall_ns) + "\n";
    worst = std::max(worst, art.exit_code);
  }
  write_file(prefix + "_summary.csv", summary);
  return worst;
}

/// compare subcommand: same problem and stop rule across methods. Method
/// tokens are the solver names plus the "-adaptive" suffix for the adaptive
/// stepsize variant (e.g. "fbf-adaptive").
inline int cmd_compare(const std::string& problem, std::vector<std::string> methods,
                       const LambdaSpec& lambda, double mu, double tol, long max_iter,
                       const std::string& prefix, const std::string& emit = "both",
                       const LambdaSpec* adaptive_lambda0 = nullptr) {
  require(!methods.empty(), "compare: empty method list");
  std::sort(methods.begin(), methods.end());
  detail::ensure_parent_dir(prefix);
  std::string summary = "method,iterations,f_evals,proj_calls,final_dist_ref\n";
  int worst = 0;
  for (const std::string& token : methods) {
    RunSpec rs;
    rs.problem = problem;
    const std::string suffix = "-adaptive";
    if (token.size() > suffix.size() &&
        token.compare(token.size() - suffix.size(), suffix.size(), suffix) == 0) {
      rs.method = token.substr(0, token.size() - suffix.size());
      rs.lambda_mode = "adaptive";
      rs.lambda = adaptive_lambda0 ? *adaptive_lambda0 : LambdaSpec::absolute(1.0);
      rs.mu = mu;
    } else {
      rs.method = token;
      rs.lambda = lambda;
    }
    rs.max_iter = max_iter;
    rs.stop_type = "dist_ref";
    rs.stop_tol = tol;
    rs.output = prefix + "_" + token;
    rs.emit = emit;
    RunArtifacts art = execute(rs);
    persist(art, rs.output, rs.emit);
    char dist[40];
    std::snprintf(dist, sizeof dist, "%.17g", art.report.final_dist_ref);
    summary += token + "," + std::to_string(art.report.iterations) + "," +
               std::to_string(art.report.total_f_evals) + "," +
               std::to_string(art.report.total_proj_calls) + "," + dist + "\n";
    worst = std::max(worst, art.exit_code);
  }
  write_file(prefix + "_summary.csv", summary);
  return worst;
}

/// flow subcommand: integrates the continuous-time system for each stepsize
/// and writes one trajectory CSV per lambda plus a small JSON summary.
inline int cmd_flow(const std::string& problem, const std::vector<LambdaSpec>& lambdas, double T,
                    double h, long stride, const std::string& prefix) {
  require(!lambdas.empty(), "flow: empty lambda list");
  const ProblemInstance& p = find_problem(problem);
  detail::ensure_parent_dir(prefix);
  json summary = json::array();
  int code = 0;
  for (const LambdaSpec& ls : lambdas) {
    FlowConfig fc;
    fc.lambda = ls.resolve(p);
    fc.x0 = p.x0;
    fc.h = h;
    fc.T = T;
    fc.integrator = Integrator::Rk4;
    fc.sample_stride = stride;
    Trajectory traj = integrate(fc, p.op, p.set, p.x_ref);
    const std::string path = prefix + "_lam" + detail::fmt_short(fc.lambda) + "_traj.csv";
    write_file(path, trajectory_to_csv(traj));
    const double final_dist =
        p.x_ref && !traj.states.empty() ? (traj.states.back() - *p.x_ref).norm()
                                        : std::numeric_limits<double>::quiet_NaN();
    summary.push_back(json{{"lambda", fc.lambda},
                           {"lambda_spec", ls.text()},
                           {"csv", path},
                           {"final_dist_ref", final_dist},
                           {"final_gap", traj.gap.empty() ? 0.0 : traj.gap.back()},
                           {"diverged", traj.diverged}});
    if (traj.diverged) code = 3;
  }
  write_file(prefix + "_flow_report.json",
             json{{"problem", problem}, {"T", T}, {"h", h}, {"trajectories", summary}}.dump(2) +
                 "\n");
  return code;
}

/// certify subcommand: re-reads a persisted trace CSV and runs the
/// rate/inequality diagnostics against the problem's cached constants.
inline int cmd_certify(const std::string& problem, const std::string& trace_path,
                       const std::string& out_json) {
  const ProblemInstance& p = find_problem(problem);
  const Trace trace = read_trace_csv(trace_path);
  const RateReport rep = certify_trace(trace, p.lipschitz(), p.gamma_hat);
  json j{{"problem", problem},
         {"trace", trace_path},
         {"rows", trace.size()},
         {"lipschitz", p.lipschitz()},
         {"gamma_hat", p.gamma_hat},
         {"fejer_violations", rep.fejer_violations},
         {"prop32_violations", rep.prop32_violations},
         {"delta_empirical", rep.delta_empirical}};
  if (!rep.delta_theoretical.empty()) {
    j["delta_theoretical_max"] =
        *std::max_element(rep.delta_theoretical.begin(), rep.delta_theoretical.end());
  }
  if (out_json.empty()) {
    std::fputs((j.dump(2) + "\n").c_str(), stdout);
  } else {
    detail::ensure_parent_dir(out_json);
    write_file(out_json, j.dump(2) + "\n");
  }
  return 0;
}

inline std::string list_problems_text() {
  std::string out;
  for (const ProblemInstance& p : registry()) {
    char line[256];
    std::snprintf(line, sizeof line,
                  "%-18s dim=%ld  L=%.6g  L_est=%.6g  L_ref=%s  gamma=%.6g  x_ref=%s\n",
                  p.name.c_str(), static_cast<long>(p.op.dim()), p.lipschitz(), p.lipschitz_est,
                  p.lipschitz_ref ? detail::fmt_short(*p.lipschitz_ref).c_str() : "-",
                  p.gamma_hat, p.x_ref ? "yes" : "no");
    out += line;
  }
  return out;
}

}  // namespace visolve
