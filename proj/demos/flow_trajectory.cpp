// Integrates the continuous-time forward-backward-forward system on the
// plane3 problem for three stepsizes and prints the terminal distances.

#include <cstdio>

#include "visolve/flow.hpp"
#include "visolve/problems.hpp"

int main() {
  using namespace visolve;

  const ProblemInstance& p = find_problem("plane3");
  for (double c : {0.99, 0.8, 0.5}) {
    FlowConfig fc;
    fc.lambda = c / p.lipschitz();
    fc.x0 = p.x0;
    fc.h = 1e-3;
    fc.T = 50.0;
    fc.sample_stride = 1000;
    Trajectory traj = integrate(fc, p.op, p.set, p.x_ref);
    std::printf("lambda = %.4f: |x(T)| = %.3e, gap = %.3e\n", fc.lambda,
                (traj.states.back() - *p.x_ref).norm(), traj.gap.back());
  }
  return 0;
}
