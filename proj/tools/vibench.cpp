// Benchmark CLI for the variational-inequality solvers: run a single solve,
// sweep relaxation parameters, compare methods, integrate the continuous-time
// system, and certify persisted traces.

#include <cstdio>
#include <exception>
#include <fstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "visolve/bench.hpp"

namespace {

using visolve::LambdaSpec;

std::vector<LambdaSpec> parse_lambda_list(const std::vector<std::string>& texts) {
  std::vector<LambdaSpec> out;
  out.reserve(texts.size());
  for (const std::string& t : texts) out.push_back(LambdaSpec::parse(t));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"vibench - variational inequality solver benchmarks"};
  app.require_subcommand(1);

  // solve
  auto* solve_cmd = app.add_subcommand("solve", "run one solver configuration");
  std::string cfg_path, problem, method = "fbf", lambda_text = "0.5/L", lambda_mode = "fixed";
  std::string stop_type = "dist_ref", out_prefix = "run", emit = "both";
  double mu = 0.9, tol = 1e-6;
  std::vector<double> rhos{1.0};
  long max_iter = 100000;
  std::uint64_t seed = 0;
  bool allow_unsafe = false;
  solve_cmd->add_option("--config", cfg_path, "RunSpec JSON file (overrides other flags)");
  solve_cmd->add_option("--problem", problem, "registry problem name");
  solve_cmd->add_option("--method", method,
                        "fbf | extragradient | subgradient_extragradient | projected_gradient");
  solve_cmd->add_option("--lambda", lambda_text, "stepsize: number, c/L or c/Lref");
  solve_cmd->add_option("--lambda-mode", lambda_mode, "fixed | adaptive");
  solve_cmd->add_option("--mu", mu, "adaptive stepsize factor in (0,1)");
  solve_cmd->add_option("--rho", rhos, "relaxation parameter(s)");
  solve_cmd->add_option("--tol", tol, "stop tolerance");
  solve_cmd->add_option("--stop", stop_type, "residual | dist_ref | exact");
  solve_cmd->add_option("--max-iter", max_iter, "iteration cap");
  solve_cmd->add_option("--seed", seed, "run seed (recorded in the report)");
  solve_cmd->add_option("--out", out_prefix, "output path prefix");
  solve_cmd->add_option("--emit", emit, "csv | json | both");
  solve_cmd->add_flag("--allow-unsafe-lambda", allow_unsafe,
                      "skip the lambda*L < 1 and overrelaxation safeguards");

  // sweep-rho
  auto* sweep_cmd = app.add_subcommand("sweep-rho", "fbf runs over a list of relaxation values");
  std::string sw_problem, sw_lambda = "0.5/L", sw_out = "sweep";
  std::vector<double> sw_rhos;
  double sw_tol = 1e-6;
  long sw_max_iter = 100000;
  sweep_cmd->add_option("--problem", sw_problem)->required();
  sweep_cmd->add_option("--rho", sw_rhos, "relaxation values")->required();
  sweep_cmd->add_option("--lambda", sw_lambda);
  sweep_cmd->add_option("--tol", sw_tol);
  sweep_cmd->add_option("--max-iter", sw_max_iter);
  sweep_cmd->add_option("--out", sw_out);

  // compare
  auto* cmp_cmd = app.add_subcommand("compare", "run several methods on one problem");
  std::string cp_problem, cp_lambda = "0.99/L", cp_lambda0 = "1", cp_out = "compare";
  std::vector<std::string> cp_methods;
  double cp_mu = 0.9, cp_tol = 1e-6;
  long cp_max_iter = 100000;
  cmp_cmd->add_option("--problem", cp_problem)->required();
  cmp_cmd->add_option("--method", cp_methods,
                      "method tokens; append -adaptive for the adaptive variant")
      ->required();
  cmp_cmd->add_option("--lambda", cp_lambda, "fixed stepsize for non-adaptive methods");
  cmp_cmd->add_option("--lambda0", cp_lambda0, "initial stepsize for adaptive methods");
  cmp_cmd->add_option("--mu", cp_mu);
  cmp_cmd->add_option("--tol", cp_tol);
  cmp_cmd->add_option("--max-iter", cp_max_iter);
  cmp_cmd->add_option("--out", cp_out);

  // flow
  auto* flow_cmd = app.add_subcommand("flow", "integrate the continuous-time system");
  std::string fl_problem, fl_out = "flow";
  std::vector<std::string> fl_lambdas;
  double fl_T = 200.0, fl_h = 1e-3;
  long fl_stride = 100;
  flow_cmd->add_option("--problem", fl_problem)->required();
  flow_cmd->add_option("--lambda", fl_lambdas, "stepsize(s): number, c/L or c/Lref")->required();
  flow_cmd->add_option("--T", fl_T, "horizon");
  flow_cmd->add_option("--h", fl_h, "integrator step");
  flow_cmd->add_option("--stride", fl_stride, "sample stride");
  flow_cmd->add_option("--out", fl_out);

  // certify
  auto* cert_cmd = app.add_subcommand("certify", "run diagnostics on an existing trace CSV");
  std::string ct_problem, ct_trace, ct_out;
  cert_cmd->add_option("--problem", ct_problem)->required();
  cert_cmd->add_option("--trace", ct_trace, "trace CSV path")->required();
  cert_cmd->add_option("--out", ct_out, "output JSON path (default: stdout)");

  auto* list_cmd = app.add_subcommand("list-problems", "print the problem registry");

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve_cmd->parsed()) {
      visolve::RunSpec rs;
      if (!cfg_path.empty()) {
        std::ifstream is(cfg_path);
        if (!is) {
          std::fprintf(stderr, "error: cannot open config '%s'\n", cfg_path.c_str());
          return 1;
        }
        visolve::json j = visolve::json::parse(is);
        rs = visolve::parse_runspec(j);
      } else {
        if (problem.empty()) {
          std::fprintf(stderr, "error: --problem or --config is required\n");
          return 1;
        }
        rs.problem = problem;
        rs.method = method;
        rs.lambda = LambdaSpec::parse(lambda_text);
        rs.lambda_mode = lambda_mode;
        rs.mu = mu;
        rs.rho = rhos;
        rs.max_iter = max_iter;
        rs.stop_type = stop_type;
        rs.stop_tol = tol;
        rs.seed = seed;
        rs.allow_unsafe_lambda = allow_unsafe;
        rs.output = out_prefix;
        rs.emit = emit;
      }
      return visolve::cmd_solve(rs);
    }
    if (sweep_cmd->parsed())
      return visolve::cmd_sweep_rho(sw_problem, sw_rhos, LambdaSpec::parse(sw_lambda), sw_tol,
                                    sw_max_iter, sw_out);
    if (cmp_cmd->parsed()) {
      const LambdaSpec lam0 = LambdaSpec::parse(cp_lambda0);
      return visolve::cmd_compare(cp_problem, cp_methods, LambdaSpec::parse(cp_lambda), cp_mu,
                                  cp_tol, cp_max_iter, cp_out, "both", &lam0);
    }
    if (flow_cmd->parsed())
      return visolve::cmd_flow(fl_problem, parse_lambda_list(fl_lambdas), fl_T, fl_h, fl_stride,
                               fl_out);
    if (cert_cmd->parsed()) return visolve::cmd_certify(ct_problem, ct_trace, ct_out);
    if (list_cmd->parsed()) {
      std::fputs(visolve::list_problems_text().c_str(), stdout);
      return 0;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
