#pragma once

#include <cmath>
#include <cstring>
#include <functional>
#include <vector>

namespace direx {

// Objective contract: returns the value at x and, when grad != nullptr,
// fills the gradient. Infeasible points are signalled with NaN/inf and are
// rejected by the line search.
using BoxObjective = std::function<double(const double* x, double* grad)>;

struct BoxResult {
  std::vector<double> x;
  double value = 0;
  int iterations = 0;
  bool converged = false;
};

// Projected BFGS with Armijo backtracking. Suitable for the smooth low
// dimensional objectives here; the inverse Hessian is reset whenever the
// active set changes.
BoxResult minimize_box(const BoxObjective& fn, const std::vector<double>& lo, const std::vector<double>& hi,
                       std::vector<double> x0, int max_iters, double tol);

}  // namespace direx
