#include "floq/grape.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <thread>
#include <vector>

#include "floq/box_lbfgs.hpp"
#include "floq/numerics.hpp"

namespace floq {

namespace {

constexpr double kdegeneracy_tol = 1e-10;

// Deterministic, platform-independent stream for restart initializations.
struct splitmix64 {
    std::uint64_t state = 0;

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

std::uint64_t derive_seed(std::uint64_t seed, int restart) {
    splitmix64 rng{seed + static_cast<std::uint64_t>(restart)};
    return rng.next();
}

struct step_data {
    EigenSystem eig;
    MatC U;
};

std::vector<step_data> step_unitaries(const ControlProblem& problem, const ControlSequence& seq) {
    const int N = problem.N;
    const double tau = problem.tau();
    std::vector<step_data> steps(N);
    for (int j = 0; j < N; ++j) {
        MatC H = problem.drift;
        for (int k = 0; k < problem.R(); ++k) H += seq.u(k, j) * problem.controls[k];
        steps[j].eig = eigh(H);
        steps[j].U = expm_i(steps[j].eig, tau);
    }
    return steps;
}

// Divided differences of z -> exp(-i z tau) on the step spectrum.
MatC exp_divided_differences(const VecR& lambda, double tau) {
    const int D = static_cast<int>(lambda.size());
    const double scale = kdegeneracy_tol * std::max(1.0, lambda.cwiseAbs().maxCoeff());
    VecC phases(D);
    for (int a = 0; a < D; ++a) phases(a) = std::exp(cxd(0.0, -lambda(a) * tau));
    MatC gamma(D, D);
    for (int a = 0; a < D; ++a) {
        for (int b = 0; b < D; ++b) {
            const double dl = lambda(a) - lambda(b);
            if (std::abs(dl) < scale) {
                gamma(a, b) = cxd(0.0, -tau) * phases(a);
            } else {
                gamma(a, b) = (phases(a) - phases(b)) / dl;
            }
        }
    }
    return gamma;
}

struct run_result {
    ControlSequence seq;
    double fidelity = 0.0;
    double initial_fidelity = 0.0;
    int iterations = 0;
    std::vector<double> history;  // fidelity after every accepted step
};

ControlSequence unflatten(const ControlProblem& problem, const VecR& x) {
    ControlSequence seq;
    seq.u = Eigen::Map<const MatR>(x.data(), problem.R(), problem.N);
    return seq;
}

run_result run_single(const ControlProblem& problem, const MatC& target,
                      const OptimizeOptions& options, const ControlSequence& start,
                      std::atomic<bool>& zero_trace_seen) {
    const int R = problem.R();
    const int N = problem.N;
    VecR lo(R * N), hi(R * N), x0(R * N);
    for (int j = 0; j < N; ++j) {
        for (int k = 0; k < R; ++k) {
            lo(j * R + k) = problem.bounds[k].first;
            hi(j * R + k) = problem.bounds[k].second;
            x0(j * R + k) = std::clamp(start.u(k, j), problem.bounds[k].first,
                                       problem.bounds[k].second);
        }
    }

    BoxObjective objective = [&](const VecR& x, VecR& grad) {
        FidGrad fg = fidelity_and_gradient(problem, unflatten(problem, x), target,
                                           options.objective);
        if (fg.zero_trace) zero_trace_seen.store(true, std::memory_order_relaxed);
        grad = -Eigen::Map<const VecR>(fg.gradient.data(), R * N);
        return -fg.fidelity;
    };

    BoxLbfgsOptions lopt;
    lopt.memory = options.memory;
    lopt.max_iter = options.max_iter;
    lopt.f_tol = options.convergence_tol;
    lopt.grad_tol = options.grad_tol;
    BoxLbfgsResult res = box_lbfgs_minimize(objective, x0, lo, hi, lopt);

    run_result out;
    out.seq = unflatten(problem, res.x);
    out.fidelity = -res.f;
    out.initial_fidelity = res.history.empty() ? -res.f : -res.history.front();
    out.iterations = res.iterations;
    out.history.reserve(res.history.size());
    for (double f : res.history) out.history.push_back(-f);
    return out;
}

ControlSequence random_start(const ControlProblem& problem, std::uint64_t seed) {
    splitmix64 rng{seed};
    ControlSequence seq;
    seq.u.resize(problem.R(), problem.N);
    for (int j = 0; j < problem.N; ++j) {
        for (int k = 0; k < problem.R(); ++k) {
            const auto [l, h] = problem.bounds[k];
            seq.u(k, j) = l + (h - l) * rng.uniform01();
        }
    }
    return seq;
}

}  // namespace

void ControlProblem::validate() const {
    const int D = dim();
    if (D < 1 || drift.cols() != D) throw config_error("control problem: drift must be square");
    check_hermitian(drift, "control problem drift");
    if (controls.empty()) throw config_error("control problem: needs at least one control");
    if (bounds.size() != controls.size())
        throw config_error("control problem: one (lo, hi) bound pair per control");
    for (std::size_t k = 0; k < controls.size(); ++k) {
        if (controls[k].rows() != D || controls[k].cols() != D)
            throw config_error("control problem: control dimension mismatch");
        check_hermitian(controls[k], "control generator");
        if (!(bounds[k].first <= bounds[k].second))
            throw config_error("control problem: bound lo > hi");
    }
    if (N < 1) throw config_error("control problem: N must be positive");
    if (!(T > 0.0)) throw config_error("control problem: T must be positive");
}

MatC propagate(const ControlProblem& problem, const ControlSequence& seq) {
    problem.validate();
    if (seq.u.rows() != problem.R() || seq.u.cols() != problem.N)
        throw config_error("control sequence shape must be R x N");
    MatC F = MatC::Identity(problem.dim(), problem.dim());
    for (const step_data& step : step_unitaries(problem, seq)) F = step.U * F;
    return F;
}

FidGrad fidelity_and_gradient(const ControlProblem& problem, const ControlSequence& seq,
                              const MatC& target, Objective objective) {
    problem.validate();
    if (seq.u.rows() != problem.R() || seq.u.cols() != problem.N)
        throw config_error("control sequence shape must be R x N");
    if (target.rows() != problem.dim() || target.cols() != problem.dim())
        throw config_error("target dimension mismatch");

    const int D = problem.dim();
    const int N = problem.N;
    const int R = problem.R();
    const double tau = problem.tau();
    const std::vector<step_data> steps = step_unitaries(problem, seq);

    // pre[j] = U_{j-1} ... U_1 and post[j] = U_N ... U_{j+1} so that
    // F = post[j] U_j pre[j] for every j.
    std::vector<MatC> pre(N), post(N);
    pre[0] = MatC::Identity(D, D);
    for (int j = 1; j < N; ++j) pre[j] = steps[j - 1].U * pre[j - 1];
    post[N - 1] = MatC::Identity(D, D);
    for (int j = N - 2; j >= 0; --j) post[j] = post[j + 1] * steps[j + 1].U;

    const MatC F = post[0] * steps[0].U * pre[0];
    const cxd tr = (target.adjoint() * F).trace();

    FidGrad out;
    out.gradient = MatR::Zero(R, N);
    cxd phase;
    if (objective == Objective::AbsTrace) {
        out.fidelity = std::abs(tr) / D;
        if (std::abs(tr) == 0.0) {
            out.zero_trace = true;
            return out;  // |tr| is not differentiable at 0; report a null step
        }
        phase = std::conj(tr) / std::abs(tr);
    } else {
        out.fidelity = tr.real() / D;
        phase = cxd(1.0, 0.0);
    }

    const MatC target_adj = target.adjoint();
    for (int j = 0; j < N; ++j) {
        const MatC& V = steps[j].eig.eigenvectors;
        const MatC gamma = exp_divided_differences(steps[j].eig.eigenvalues, tau);
        // d tr(target^dag F)/du_kj = sum_ab (V^dag A V)_ba Gamma_ab (V^dag C_k V)_ab;
        // pushing the eigenbasis rotation onto the A side once per step makes
        // each control a Hadamard sum instead of a pair of matrix products
        const MatC A = pre[j] * target_adj * post[j];
        const MatC mg = (V.adjoint() * A * V).transpose().cwiseProduct(gamma);
        const MatC S = V.conjugate() * mg * V.transpose();
        for (int k = 0; k < R; ++k) {
            const cxd dtr = problem.controls[k].cwiseProduct(S).sum();
            out.gradient(k, j) = (phase * dtr).real() / D;
        }
    }
    return out;
}

std::pair<ControlSequence, OptimizationReport> optimize(const ControlProblem& problem,
                                                        const MatC& target,
                                                        const OptimizeOptions& options) {
    problem.validate();
    if (options.restarts < 1) throw config_error("optimize: needs at least one restart");

    std::atomic<bool> zero_trace_seen{false};
    std::vector<run_result> results(options.restarts);
    std::atomic<int> next{0};
    auto worker = [&]() {
        for (int r = next.fetch_add(1); r < options.restarts; r = next.fetch_add(1)) {
            const ControlSequence start = random_start(problem, derive_seed(options.seed, r));
            results[r] = run_single(problem, target, options, start, zero_trace_seen);
        }
    };

    int n_threads = options.threads > 0
                        ? options.threads
                        : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    n_threads = std::min(n_threads, options.restarts);
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }

    int best = 0;
    bool improved = false;
    for (int r = 0; r < options.restarts; ++r) {
        if (results[r].fidelity > results[best].fidelity) best = r;
        if (results[r].fidelity > results[r].initial_fidelity) improved = true;
    }

    OptimizationReport report;
    report.best_fidelity = results[best].fidelity;
    report.iterations = results[best].iterations;
    report.restarts_used = options.restarts;
    report.fidelity_history = results[best].history;
    report.seed = options.seed;
    report.objective = options.objective;
    report.best_restart = best;
    report.warning_no_improvement = !improved;
    report.warning_zero_trace = zero_trace_seen.load();
    return {results[best].seq, report};
}

std::pair<ControlSequence, OptimizationReport> optimize_warm(const ControlProblem& problem,
                                                             const MatC& target,
                                                             const ControlSequence& start,
                                                             const OptimizeOptions& options) {
    problem.validate();
    if (start.u.rows() != problem.R() || start.u.cols() != problem.N)
        throw config_error("warm start shape must be R x N");
    std::atomic<bool> zero_trace_seen{false};
    run_result res = run_single(problem, target, options, start, zero_trace_seen);

    OptimizationReport report;
    report.best_fidelity = res.fidelity;
    report.iterations = res.iterations;
    report.restarts_used = 1;
    report.fidelity_history = res.history;
    report.seed = options.seed;
    report.objective = options.objective;
    report.best_restart = 0;
    report.warning_no_improvement = !(res.fidelity > res.initial_fidelity);
    report.warning_zero_trace = zero_trace_seen.load();
    return {res.seq, report};
}

ControlProblem chain_problem(const Sector& sector, const DriveSpec& drive, int N, double T) {
    if (!drive.drive_g && !drive.drive_J)
        throw config_error("chain problem: at least one drive family must be on");
    const Basis basis(sector);
    const int L = sector.L;

    ChainDriveFrame drift_frame;
    drift_frame.g = VecR::Zero(L);
    drift_frame.J = drive.drive_J ? VecR::Zero(L - 1) : VecR::Constant(L - 1, drive.J0);
    drift_frame.U = drive.U;

    ControlProblem problem;
    problem.drift = build_chain(basis, drift_frame, drive.convention);
    problem.N = N;
    problem.T = T;

    if (drive.drive_g) {
        for (int l = 0; l < L; ++l) {
            ChainDriveFrame f;
            f.g = VecR::Zero(L);
            f.g(l) = 1.0;
            f.J = VecR::Zero(L - 1);
            f.U = 0.0;
            problem.controls.push_back(build_chain(basis, f, drive.convention));
            problem.bounds.emplace_back(-drive.gmax, drive.gmax);
        }
    }
    if (drive.drive_J) {
        for (int l = 0; l + 1 < L; ++l) {
            ChainDriveFrame f;
            f.g = VecR::Zero(L);
            f.J = VecR::Zero(L - 1);
            f.J(l) = 1.0;
            f.U = 0.0;
            problem.controls.push_back(build_chain(basis, f, drive.convention));
            problem.bounds.emplace_back(-drive.jmax, drive.jmax);
        }
    }
    problem.validate();
    return problem;
}

std::vector<std::string> chain_control_names(const Sector& sector, const DriveSpec& drive) {
    std::vector<std::string> names;
    if (drive.drive_g)
        for (int l = 1; l <= sector.L; ++l) names.push_back("g" + std::to_string(l));
    if (drive.drive_J)
        for (int l = 1; l < sector.L; ++l) names.push_back("J" + std::to_string(l));
    return names;
}

}  // namespace floq
