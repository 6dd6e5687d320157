#pragma once

#include <functional>
#include <vector>

namespace rnr {

// Deterministic limited-memory BFGS with Armijo backtracking. Shared by the
// chain model and MaxEnt trainers; both objectives are smooth and (with
// L2 regularization) strictly convex, so plain backtracking suffices.
struct LbfgsConfig {
    int max_iter = 500;
    double tol = 1e-5;  // convergence: gradient infinity-norm below this
    int history = 10;
    double armijo_c1 = 1e-4;
    double backtrack = 0.5;
    int max_line_search = 60;
};

struct LbfgsResult {
    std::vector<double> x;
    double loss = 0.0;
    double grad_inf_norm = 0.0;
    int iterations = 0;
    bool converged = false;  // gradient tolerance reached (vs. iteration cap
                             // or a stalled line search at the found minimum)
};

// objective(x, grad) returns the loss and fills grad (same size as x).
// Throws NumericError if the objective ever returns a non-finite loss or
// gradient. Evaluation order is fixed, so results are bit-reproducible.
using Objective = std::function<double(const std::vector<double>&, std::vector<double>&)>;

LbfgsResult minimize(const Objective& objective, std::vector<double> x0,
                     const LbfgsConfig& config);

}  // namespace rnr
