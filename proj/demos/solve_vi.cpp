// Minimal library usage: solve a small variational inequality with the
// forward-backward-forward method and print the iterate trail.

#include <cstdio>

#include "visolve/problems.hpp"
#include "visolve/solvers.hpp"

int main() {
  using namespace visolve;

  const ProblemInstance& p = find_problem("plane3");

  SolverConfig cfg;
  cfg.method = Method::Fbf;
  cfg.lambda_mode = LambdaMode::fixed(0.5 / p.lipschitz());
  cfg.rho = RhoSchedule::constant(1.0);
  cfg.x0 = p.x0;
  cfg.max_iter = 2000;
  cfg.stop = StopRule::dist_to_ref_below(1e-8);
  cfg.x_ref = p.x_ref;
  cfg.lipschitz = p.lipschitz();

  SolveResult res = solve(cfg, p.op, p.set);
  std::printf("status: %s after %zu iterations\n", to_string(res.status), res.trace.size());
  for (std::size_t i = 0; i < res.trace.size(); i += 20) {
    const TraceRow& r = res.trace[i];
    std::printf("  it %4ld  dist %.3e  residual %.3e\n", r.iter, r.dist_ref, r.residual);
  }
  std::printf("x = [%g %g %g]\n", res.x_final[0], res.x_final[1], res.x_final[2]);
  return 0;
}
