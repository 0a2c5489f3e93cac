#include "floq/floquet.hpp"

#include <cmath>

#include "floq/targets.hpp"

namespace floq {

FloquetResult floquet_from_operator(const MatC& F, double T) {
    FloquetResult out;
    out.floquet_op = F;
    out.T = T;
    LogmResult log = logm_unitary(F, T);
    out.H_eff = std::move(log.H_eff);
    out.quasienergies = std::move(log.quasienergies);
    out.near_branch_cut = log.near_branch_cut;
    return out;
}

FloquetResult floquet_from_controls(const ControlProblem& problem, const ControlSequence& seq) {
    return floquet_from_operator(propagate(problem, seq), problem.T);
}

FloquetResult floquet_from_controls(const ControlProblem& problem, const ControlSequence& seq,
                                    const MatC& target_unitary, Objective objective) {
    FloquetResult out = floquet_from_controls(problem, seq);
    out.fidelity_to_target = objective == Objective::AbsTrace
                                 ? fidelity_abs(target_unitary, out.floquet_op)
                                 : fidelity_real(target_unitary, out.floquet_op);
    return out;
}

std::vector<VecC> stroboscopic_evolve(const MatC& F, const VecC& psi0, int n_periods) {
    if (F.rows() != F.cols() || F.rows() != psi0.size())
        throw config_error("stroboscopic evolution: dimension mismatch");
    if (n_periods < 0) throw config_error("stroboscopic evolution: negative period count");
    if (std::abs(psi0.norm() - 1.0) > 1e-9)
        throw config_error("stroboscopic evolution: state must be normalized");
    std::vector<VecC> trajectory;
    trajectory.reserve(n_periods + 1);
    trajectory.push_back(psi0);
    for (int n = 1; n <= n_periods; ++n) {
        trajectory.push_back(F * trajectory.back());
        if (std::abs(trajectory.back().norm() - 1.0) > 1e-9)
            throw numeric_error("stroboscopic evolution: norm drifted beyond 1e-9");
    }
    return trajectory;
}

FloquetResult lift_single_particle(const Sector& target_sector, const DriveSpec& drive,
                                   const ControlSequence& seq, double T,
                                   const MatC& single_target_unitary, Objective objective) {
    if (target_sector.stats != Statistics::Hardcore)
        throw config_error("lift: only hardcore sectors ride the free-fermion lift");
    if (single_target_unitary.rows() != target_sector.L ||
        single_target_unitary.cols() != target_sector.L)
        throw config_error("lift: single-particle target must be L x L");
    const int N = static_cast<int>(seq.u.cols());
    ControlProblem lifted = chain_problem(target_sector, drive, N, T);
    const MatC target_M = compound_matrix(single_target_unitary, target_sector.M);
    return floquet_from_controls(lifted, seq, target_M, objective);
}

namespace {

double schedule_value(LambdaSchedule schedule, int n, int cycles) {
    const double s = static_cast<double>(n) / cycles;
    return schedule == LambdaSchedule::Linear ? s : s * s * (3.0 - 2.0 * s);
}

}  // namespace

AdiabaticTrajectory adiabatic_sweep(const ControlProblem& problem, const MatC& H_diag,
                                    const MatC& H_final, const MatC& cost_operator,
                                    const AdiabaticOptions& options) {
    problem.validate();
    const int D = problem.dim();
    if (H_diag.rows() != D || H_final.rows() != D || cost_operator.rows() != D ||
        H_diag.cols() != D || H_final.cols() != D || cost_operator.cols() != D)
        throw config_error("adiabatic sweep: operator dimensions must match the problem");
    check_hermitian(H_diag, "adiabatic H_diag");
    check_hermitian(H_final, "adiabatic H_final");
    check_hermitian(cost_operator, "adiabatic cost operator");
    if (options.cycles < 1) throw config_error("adiabatic sweep: needs at least one cycle");

    AdiabaticTrajectory traj;
    traj.cycles.reserve(options.cycles + 1);

    VecC psi = eigh(H_diag).eigenvectors.col(0);
    ControlSequence warm;
    for (int n = 0; n <= options.cycles; ++n) {
        const double lambda = schedule_value(options.schedule, n, options.cycles);
        const MatC H_target = (1.0 - lambda) * H_diag + lambda * H_final;
        const MatC U_target = expm_i(H_target, problem.T);

        ControlSequence seq;
        OptimizationReport report;
        if (n == 0) {
            std::tie(seq, report) = optimize(problem, U_target, options.grape);
        } else {
            std::tie(seq, report) = optimize_warm(problem, U_target, warm, options.grape);
        }
        warm = seq;

        FloquetResult cycle_floq = floquet_from_controls(problem, seq, U_target,
                                                         options.grape.objective);
        if (n > 0) psi = cycle_floq.floquet_op * psi;

        AdiabaticCycle rec;
        rec.cycle = n;
        rec.lambda = lambda;
        rec.controls = seq;
        rec.quasienergies = cycle_floq.quasienergies;
        rec.grape_fidelity = report.best_fidelity;
        const VecC ground = eigh(cycle_floq.H_eff).eigenvectors.col(0);
        rec.ground_fidelity = std::norm(ground.dot(psi));
        rec.cost_expectation = psi.dot(cost_operator * psi).real();
        if (D == 8) {
            try {
                rec.decoded = readout_assignment(psi / psi.norm());
                rec.decoded_ok = true;
            } catch (const ambiguity_error&) {
                rec.decoded_ok = false;
            }
        }
        traj.cycles.push_back(std::move(rec));

        if (report.best_fidelity < options.fidelity_floor) {
            traj.aborted = true;
            traj.abort_reason = "cycle " + std::to_string(n) + " optimization reached fidelity " +
                                std::to_string(report.best_fidelity) + ", below the floor " +
                                std::to_string(options.fidelity_floor);
            break;
        }
    }
    traj.final_state = psi;
    return traj;
}

}  // namespace floq
