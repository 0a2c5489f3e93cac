#include "doctest.h"

#include <cmath>
#include <random>

#include "floq/grape.hpp"
#include "floq/numerics.hpp"
#include "floq/operators.hpp"

using namespace floq;

namespace {

MatC random_hermitian(int D, std::mt19937& rng) {
    std::normal_distribution<double> gauss;
    MatC A(D, D);
    for (int r = 0; r < D; ++r)
        for (int c = 0; c < D; ++c) A(r, c) = cxd(gauss(rng), gauss(rng));
    return 0.5 * (A + A.adjoint());
}

ControlProblem random_problem(int D, int R, int N, double T, std::mt19937& rng) {
    ControlProblem p;
    p.drift = random_hermitian(D, rng);
    for (int k = 0; k < R; ++k) p.controls.push_back(random_hermitian(D, rng));
    p.bounds.assign(R, {-2.0, 2.0});
    p.N = N;
    p.T = T;
    return p;
}

ControlSequence random_controls(const ControlProblem& p, std::mt19937& rng) {
    std::uniform_real_distribution<double> box(-1.5, 1.5);
    ControlSequence seq;
    seq.u.resize(p.R(), p.N);
    for (int j = 0; j < p.N; ++j)
        for (int k = 0; k < p.R(); ++k) seq.u(k, j) = box(rng);
    return seq;
}

// central finite difference of the scalar objective in one control entry
double fd_derivative(const ControlProblem& p, ControlSequence seq, const MatC& target,
                     Objective obj, int k, int j, double eps) {
    seq.u(k, j) += eps;
    const double fp = fidelity_and_gradient(p, seq, target, obj).fidelity;
    seq.u(k, j) -= 2.0 * eps;
    const double fm = fidelity_and_gradient(p, seq, target, obj).fidelity;
    return (fp - fm) / (2.0 * eps);
}

}  // namespace

TEST_CASE("propagate multiplies step unitaries right to left") {
    std::mt19937 rng(5);
    ControlProblem p = random_problem(4, 2, 3, 1.7, rng);
    const ControlSequence seq = random_controls(p, rng);
    const double tau = p.tau();
    MatC expected = MatC::Identity(4, 4);
    for (int j = 0; j < p.N; ++j) {
        MatC H = p.drift;
        for (int k = 0; k < p.R(); ++k) H += seq.u(k, j) * p.controls[k];
        expected = expm_i(H, tau) * expected;  // later steps act from the left
    }
    CHECK((propagate(p, seq) - expected).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("analytic gradient matches central differences on random instances") {
    std::mt19937 rng(99);
    const double eps = 1e-6;
    int instances = 0;
    for (int D : {2, 3, 5}) {
        for (int N : {1, 4}) {
            for (Objective obj : {Objective::AbsTrace, Objective::RealTrace}) {
                ControlProblem p = random_problem(D, 2, N, 0.9 + 0.2 * D, rng);
                const ControlSequence seq = random_controls(p, rng);
                const MatC target = expm_i(random_hermitian(D, rng), 1.0);
                const FidGrad fg = fidelity_and_gradient(p, seq, target, obj);
                REQUIRE_FALSE(fg.zero_trace);
                for (int j = 0; j < p.N; ++j)
                    for (int k = 0; k < p.R(); ++k) {
                        const double fd = fd_derivative(p, seq, target, obj, k, j, eps);
                        const double an = fg.gradient(k, j);
                        CHECK(std::abs(fd - an) < 1e-6 * std::max(1.0, std::abs(an)));
                    }
                ++instances;
            }
        }
    }
    CHECK(instances == 12);
}

TEST_CASE("gradient stays correct through degenerate step spectra") {
    // single diagonal control with a two-fold degenerate eigenvalue
    ControlProblem p;
    p.drift = MatC::Zero(3, 3);
    MatC C = MatC::Zero(3, 3);
    C(0, 0) = 1.0;
    C(1, 1) = 1.0;
    C(2, 2) = -1.0;
    p.controls = {C};
    p.bounds = {{-2.0, 2.0}};
    p.N = 2;
    p.T = 1.0;
    ControlSequence seq;
    seq.u.resize(1, 2);
    seq.u << 0.7, -0.3;
    std::mt19937 rng(123);
    const MatC target = expm_i(random_hermitian(3, rng), 1.0);
    for (Objective obj : {Objective::AbsTrace, Objective::RealTrace}) {
        const FidGrad fg = fidelity_and_gradient(p, seq, target, obj);
        for (int j = 0; j < 2; ++j) {
            const double fd = fd_derivative(p, seq, target, obj, 0, j, 1e-6);
            CHECK(std::abs(fd - fg.gradient(0, j)) < 1e-6);
        }
    }
}

TEST_CASE("vanishing trace sets the flag and a zero abs-trace gradient") {
    ControlProblem p;
    p.drift = MatC::Zero(2, 2);
    MatC C = MatC::Zero(2, 2);
    C(0, 0) = 1.0;
    C(1, 1) = -1.0;
    p.controls = {C};
    p.bounds = {{-1.0, 1.0}};
    p.N = 1;
    p.T = 1.0;
    ControlSequence seq;
    seq.u = MatR::Zero(1, 1);  // propagator is the identity
    MatC target(2, 2);
    target << 0.0, 1.0, 1.0, 0.0;  // traceless against identity
    const FidGrad fg = fidelity_and_gradient(p, seq, target, Objective::AbsTrace);
    CHECK(fg.zero_trace);
    CHECK(fg.fidelity == 0.0);
    CHECK(fg.gradient.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("abs-trace fidelity ignores a global phase on the target") {
    std::mt19937 rng(7);
    ControlProblem p = random_problem(4, 2, 3, 1.1, rng);
    const ControlSequence seq = random_controls(p, rng);
    const MatC target = expm_i(random_hermitian(4, rng), 1.0);
    const MatC rotated = std::exp(cxd(0, 1.234)) * target;
    const FidGrad a = fidelity_and_gradient(p, seq, target, Objective::AbsTrace);
    const FidGrad b = fidelity_and_gradient(p, seq, rotated, Objective::AbsTrace);
    CHECK(a.fidelity == doctest::Approx(b.fidelity).epsilon(1e-12));
    CHECK((a.gradient - b.gradient).cwiseAbs().maxCoeff() < 1e-12);
    const FidGrad c = fidelity_and_gradient(p, seq, rotated, Objective::RealTrace);
    CHECK(c.fidelity < a.fidelity);  // real trace is phase sensitive
}

TEST_CASE("optimize recovers an exactly reachable target") {
    std::mt19937 rng(17);
    ControlProblem p = random_problem(3, 2, 4, 1.5, rng);
    const ControlSequence secret = random_controls(p, rng);
    const MatC target = propagate(p, secret);
    OptimizeOptions opt;
    opt.restarts = 4;
    opt.max_iter = 400;
    opt.threads = 1;
    const auto [found, report] = optimize(p, target, opt);
    CHECK(report.best_fidelity > 1.0 - 1e-6);
    CHECK(fidelity_abs(target, propagate(p, found)) > 1.0 - 1e-6);
    CHECK_FALSE(report.warning_no_improvement);
    CHECK(report.restarts_used == 4);
    CHECK(!report.fidelity_history.empty());
}

TEST_CASE("same seed gives bitwise identical optimization results") {
    std::mt19937 rng(29);
    ControlProblem p = random_problem(3, 1, 3, 1.0, rng);
    const MatC target = expm_i(random_hermitian(3, rng), 1.0);
    OptimizeOptions opt;
    opt.restarts = 3;
    opt.max_iter = 60;
    opt.seed = 4242;
    opt.threads = 2;
    const auto [u1, r1] = optimize(p, target, opt);
    const auto [u2, r2] = optimize(p, target, opt);
    CHECK(r1.best_fidelity == r2.best_fidelity);
    CHECK(r1.best_restart == r2.best_restart);
    CHECK((u1.u - u2.u).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("warm start from an optimum stays put and never degrades") {
    std::mt19937 rng(31);
    ControlProblem p = random_problem(3, 2, 3, 1.2, rng);
    const ControlSequence secret = random_controls(p, rng);
    const MatC target = propagate(p, secret);
    OptimizeOptions opt;
    opt.restarts = 4;
    opt.max_iter = 400;
    opt.threads = 1;
    const auto [cold, r1] = optimize(p, target, opt);
    const auto [warm, r2] = optimize_warm(p, target, cold, opt);
    CHECK(r2.best_fidelity >= r1.best_fidelity - 1e-12);
    CHECK((warm.u - cold.u).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("warm start clips an out-of-box initial guess") {
    ControlProblem p;
    p.drift = MatC::Zero(2, 2);
    MatC C(2, 2);
    C << 1.0, 0.0, 0.0, -1.0;
    p.controls = {C};
    p.bounds = {{-0.5, 0.5}};
    p.N = 1;
    p.T = 1.0;
    ControlSequence seq;
    seq.u = MatR::Constant(1, 1, 3.0);  // outside the box
    OptimizeOptions opt;
    opt.max_iter = 0;  // no iterations: result is the clipped start
    const auto [clipped, report] = optimize_warm(p, MatC::Identity(2, 2), seq, opt);
    CHECK(clipped.u(0, 0) == 0.5);
    CHECK(report.best_fidelity >= 0.0);
}

TEST_CASE("chain problem assembles drift, control frames, bounds, and names") {
    const Sector sector{6, 1, Statistics::Hardcore};
    DriveSpec drive;
    drive.drive_g = true;
    drive.drive_J = false;
    drive.gmax = 5.0;
    drive.J0 = 1.0;
    const ControlProblem p = chain_problem(sector, drive, 10, 10.0);
    CHECK(p.N == 10);
    CHECK(p.T == doctest::Approx(10.0));
    CHECK(p.dim() == 6);
    CHECK(p.R() == 6);

    ChainDriveFrame still;
    still.g = VecR::Zero(6);
    still.J = VecR::Constant(5, 1.0);
    CHECK((p.drift - build_chain(sector, still)).cwiseAbs().maxCoeff() == 0.0);

    for (int k = 0; k < 6; ++k) {
        ChainDriveFrame unit;
        unit.g = VecR::Zero(6);
        unit.g(k) = 1.0;
        unit.J = VecR::Zero(5);
        CHECK((p.controls[k] - build_chain(sector, unit)).cwiseAbs().maxCoeff() == 0.0);
        CHECK(p.bounds[k].first == -5.0);
        CHECK(p.bounds[k].second == 5.0);
    }
    const std::vector<std::string> names = chain_control_names(sector, drive);
    REQUIRE(names.size() == 6);
    CHECK(names.front() == "g1");
    CHECK(names.back() == "g6");
}

TEST_CASE("chain problem with both drives appends bond controls") {
    const Sector sector{4, 2, Statistics::Bosonic};
    DriveSpec drive;
    drive.drive_g = true;
    drive.drive_J = true;
    drive.gmax = 3.0;
    drive.jmax = 1.5;
    drive.J0 = 1.0;
    drive.U = 2.0;
    const ControlProblem p = chain_problem(sector, drive, 4, 2.0);
    CHECK(p.R() == 4 + 3);

    // with J driven the drift holds no hopping, only the interaction
    ChainDriveFrame still;
    still.g = VecR::Zero(4);
    still.J = VecR::Zero(3);
    still.U = 2.0;
    CHECK((p.drift - build_chain(sector, still)).cwiseAbs().maxCoeff() == 0.0);

    for (int b = 0; b < 3; ++b) {
        ChainDriveFrame unit;
        unit.g = VecR::Zero(4);
        unit.J = VecR::Zero(3);
        unit.J(b) = 1.0;
        CHECK((p.controls[4 + b] - build_chain(sector, unit)).cwiseAbs().maxCoeff() == 0.0);
        CHECK(p.bounds[4 + b].first == -1.5);
        CHECK(p.bounds[4 + b].second == 1.5);
    }
    const std::vector<std::string> names = chain_control_names(sector, drive);
    REQUIRE(names.size() == 7);
    CHECK(names[4] == "J1");
    CHECK(names[6] == "J3");
}

TEST_CASE("problem validation rejects inconsistent setups") {
    ControlProblem p;
    p.drift = MatC::Zero(2, 2);
    MatC C(2, 2);
    C << 0.0, 1.0, 1.0, 0.0;
    p.controls = {C};
    p.bounds = {{-1.0, 1.0}};
    p.N = 3;
    p.T = 1.0;
    CHECK_NOTHROW(p.validate());

    ControlProblem bad = p;
    bad.controls[0] = MatC::Zero(3, 3);
    CHECK_THROWS_AS(bad.validate(), config_error);

    bad = p;
    bad.bounds[0] = {1.0, -1.0};
    CHECK_THROWS_AS(bad.validate(), config_error);

    bad = p;
    bad.N = 0;
    CHECK_THROWS_AS(bad.validate(), config_error);

    bad = p;
    bad.T = -2.0;
    CHECK_THROWS_AS(bad.validate(), config_error);

    bad = p;
    bad.bounds.clear();
    CHECK_THROWS_AS(bad.validate(), config_error);
}
