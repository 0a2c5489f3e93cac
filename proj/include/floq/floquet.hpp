#pragma once

#include <array>
#include <limits>
#include <string>
#include <vector>

#include "floq/grape.hpp"
#include "floq/numerics.hpp"
#include "floq/types.hpp"

namespace floq {

// One-period propagator together with its principal-branch generator.
struct FloquetResult {
    MatC floquet_op;
    MatC H_eff;
    VecR quasienergies;  // ascending, in (-pi/T, pi/T]
    double fidelity_to_target = std::numeric_limits<double>::quiet_NaN();
    double T = 0.0;
    bool near_branch_cut = false;
};

FloquetResult floquet_from_operator(const MatC& F, double T);
FloquetResult floquet_from_controls(const ControlProblem& problem, const ControlSequence& seq);
FloquetResult floquet_from_controls(const ControlProblem& problem, const ControlSequence& seq,
                                    const MatC& target_unitary,
                                    Objective objective = Objective::AbsTrace);

// psi(n) = F^n psi(0) for n = 0..n_periods; norms are preserved by
// construction and checked to 1e-9.
std::vector<VecC> stroboscopic_evolve(const MatC& F, const VecC& psi0, int n_periods);

// Run a single-excitation control sequence in a hardcore (L, M) sector and
// score it against the exterior power of the single-particle target
// propagator: the free-fermion lift of the drive.
FloquetResult lift_single_particle(const Sector& target_sector, const DriveSpec& drive,
                                   const ControlSequence& seq, double T,
                                   const MatC& single_target_unitary,
                                   Objective objective = Objective::AbsTrace);

enum class LambdaSchedule { Linear, Smoothstep };

struct AdiabaticOptions {
    int cycles = 200;
    LambdaSchedule schedule = LambdaSchedule::Linear;
    double fidelity_floor = 0.999;  // abort when a cycle's optimization lands below
    OptimizeOptions grape;          // cold-start options for cycle 0; warm cycles reuse
};

struct AdiabaticCycle {
    int cycle = 0;
    double lambda = 0.0;
    ControlSequence controls;
    VecR quasienergies;
    double grape_fidelity = 0.0;
    double ground_fidelity = 0.0;   // |<lowest-quasienergy state | psi>|^2
    double cost_expectation = 0.0;
    std::array<int, 3> decoded{-1, -1, -1};
    bool decoded_ok = false;
};

struct AdiabaticTrajectory {
    std::vector<AdiabaticCycle> cycles;
    VecC final_state;
    bool aborted = false;
    std::string abort_reason;
};

// Stroboscopic adiabatic deformation H(lambda) = (1-lambda) H_diag + lambda
// H_final: each cycle re-optimizes the drive for the instantaneous target
// (warm-started from the previous cycle) and advances the state by one period.
// The state starts in the ground state of H_diag; cost_expectation tracks
// <psi| cost_operator |psi>, and dim-8 states are also decoded to bits.
AdiabaticTrajectory adiabatic_sweep(const ControlProblem& problem, const MatC& H_diag,
                                    const MatC& H_final, const MatC& cost_operator,
                                    const AdiabaticOptions& options);

}  // namespace floq
