#pragma once

#include <functional>
#include <vector>

// Derivative-free bounded minimization: Nelder-Mead simplex run in a
// transformed coordinate where x = lo + (hi - lo) sin^2(z), so every trial
// point respects its box bounds by construction. Deterministic: no random
// restarts, fixed tie-breaking.

namespace nvcycle {

struct NelderMeadOptions {
  int max_evals = 20000;
  double f_tol = 1e-12;  // absolute simplex f-spread at convergence
  double x_tol = 1e-10;  // simplex spread in transformed coordinates
  int restarts = 1;      // fresh simplexes re-seeded at the incumbent
  double initial_step = 0.25;
};

struct NelderMeadResult {
  std::vector<double> x;
  double fval = 0.0;
  bool converged = false;
  int n_evals = 0;
};

NelderMeadResult nelder_mead_bounded(
    const std::function<double(const std::vector<double>&)>& objective,
    const std::vector<double>& x0, const std::vector<double>& lower,
    const std::vector<double>& upper, const NelderMeadOptions& options = {});

}  // namespace nvcycle
