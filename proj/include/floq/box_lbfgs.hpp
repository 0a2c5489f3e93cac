#pragma once

#include <functional>
#include <vector>

#include "floq/types.hpp"

namespace floq {

// Objective callback: fills grad (same size as x) and returns f(x).
using BoxObjective = std::function<double(const VecR& x, VecR& grad)>;

struct BoxLbfgsOptions {
    int memory = 10;
    int max_iter = 1000;
    double f_tol = 1e-10;      // stop when |f_k - f_{k-1}| falls below
    double grad_tol = 1e-8;    // stop when the projected gradient inf-norm falls below
    int max_line_search = 25;
    double wolfe_c1 = 1e-4;
    double wolfe_c2 = 0.9;
};

struct BoxLbfgsResult {
    VecR x;
    double f = 0.0;
    int iterations = 0;
    bool converged = false;
    std::vector<double> history;  // f after every accepted step, starting with f(x0)
};

// Limited-memory quasi-Newton minimization of f over the box lo <= x <= hi.
// Search directions come from the standard two-loop recursion restricted to
// coordinates not pressing against an active bound; steps follow the
// projected path x(a) = clip(x + a*d) under strong-Wolfe acceptance.
BoxLbfgsResult box_lbfgs_minimize(const BoxObjective& objective, const VecR& x0,
                                  const VecR& lo, const VecR& hi,
                                  const BoxLbfgsOptions& options = {});

}  // namespace floq
