#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "floq/operators.hpp"
#include "floq/types.hpp"

namespace floq {

enum class Objective { AbsTrace, RealTrace };

// Drift plus R bounded control generators, N piecewise-constant steps over
// one period T (step length tau = T/N).
struct ControlProblem {
    MatC drift;
    std::vector<MatC> controls;
    std::vector<std::pair<double, double>> bounds;  // per control (lo, hi)
    int N = 1;
    double T = 1.0;

    int dim() const { return static_cast<int>(drift.rows()); }
    int R() const { return static_cast<int>(controls.size()); }
    double tau() const { return T / N; }
    void validate() const;
};

struct ControlSequence {
    MatR u;  // R x N, u(k, j) = value of control k during step j
};

struct OptimizeOptions {
    int max_iter = 1000;
    int restarts = 10;
    std::uint64_t seed = 0x5eed;
    Objective objective = Objective::AbsTrace;
    double convergence_tol = 1e-10;  // |dF| stop
    double grad_tol = 1e-8;          // projected-gradient inf-norm stop
    int memory = 10;
    int threads = 0;                 // 0 = hardware concurrency
};

struct OptimizationReport {
    double best_fidelity = 0.0;
    int iterations = 0;              // iterations of the winning restart
    int restarts_used = 0;
    std::vector<double> fidelity_history;  // winning restart, per iteration
    std::uint64_t seed = 0;
    Objective objective = Objective::AbsTrace;
    int best_restart = -1;
    bool warning_no_improvement = false;
    bool warning_zero_trace = false;
};

// Ordered product of the N step propagators; step 1 acts first (rightmost).
MatC propagate(const ControlProblem& problem, const ControlSequence& seq);

struct FidGrad {
    double fidelity = 0.0;
    MatR gradient;  // R x N
    bool zero_trace = false;
};

// Exact gradient via the divided-difference (spectral-theorem) rule in each
// step's eigenbasis.
FidGrad fidelity_and_gradient(const ControlProblem& problem, const ControlSequence& seq,
                              const MatC& target, Objective objective);

// Multi-restart bounded quasi-Newton ascent.  Restart r runs from its own
// deterministic uniform-in-box initialization; results merge by max fidelity
// with lowest restart index breaking ties.  Restarts run on a worker pool.
std::pair<ControlSequence, OptimizationReport> optimize(const ControlProblem& problem,
                                                        const MatC& target,
                                                        const OptimizeOptions& options);

// Single warm-started run from an explicit initial sequence (no restarts).
std::pair<ControlSequence, OptimizationReport> optimize_warm(const ControlProblem& problem,
                                                             const MatC& target,
                                                             const ControlSequence& start,
                                                             const OptimizeOptions& options);

// Chain control problems: onsite drives and optionally coupling drives.
struct DriveSpec {
    bool drive_g = true;
    bool drive_J = false;
    double gmax = 5.0;   // |g_l| bound
    double jmax = 1.0;   // |J_l| bound when driven
    double J0 = 1.0;     // fixed coupling when not driven
    double U = 0.0;      // anharmonicity (drift term)
    OnsiteConvention convention = OnsiteConvention::Number;
};

ControlProblem chain_problem(const Sector& sector, const DriveSpec& drive, int N, double T);
std::vector<std::string> chain_control_names(const Sector& sector, const DriveSpec& drive);

}  // namespace floq
