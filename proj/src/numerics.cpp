#include "floq/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "floq/basis.hpp"

namespace floq {

EigenSystem eigh(const MatC& H) {
    check_hermitian(H, "eigh");
    Eigen::SelfAdjointEigenSolver<MatC> solver(H);
    if (solver.info() != Eigen::Success)
        throw numeric_error("eigh: eigensolver failed to converge at dim " +
                            std::to_string(H.rows()));
    return {solver.eigenvalues(), solver.eigenvectors()};
}

MatC expm_i(const EigenSystem& es, double t) {
    const VecC phases = (cxd(0, -t) * es.eigenvalues.cast<cxd>().array()).exp();
    return es.eigenvectors * phases.asDiagonal() * es.eigenvectors.adjoint();
}

MatC expm_i(const MatC& H, double t) { return expm_i(eigh(H), t); }

LogmResult logm_unitary(const MatC& F, double T) {
    const int D = static_cast<int>(F.rows());
    const double scale = std::max(1.0, F.cwiseAbs().maxCoeff());
    if ((F * F.adjoint() - MatC::Identity(D, D)).cwiseAbs().maxCoeff() > 1e-8 * scale)
        throw config_error("logm_unitary: input is not unitary");
    if (T <= 0) throw config_error("logm_unitary: period must be positive");

    // A unitary is normal, so its complex Schur form is diagonal up to
    // roundoff and the Schur basis Q is an orthonormal eigenbasis.
    Eigen::ComplexSchur<MatC> schur(F);
    if (schur.info() != Eigen::Success)
        throw numeric_error("logm_unitary: Schur decomposition failed");

    constexpr double pi = std::numbers::pi;
    LogmResult out;
    VecR eps(D);
    bool near_cut = false;
    for (int a = 0; a < D; ++a) {
        const double theta = std::arg(schur.matrixT()(a, a));  // in (-pi, pi]
        double e = -theta / T;                                 // in [-pi/T, pi/T)
        if (e <= -pi / T) e += 2 * pi / T;                     // half-open branch: (-pi/T, pi/T]
        if (pi - std::abs(theta) < 1e-12) near_cut = true;
        eps[a] = e;
    }
    const MatC& Q = schur.matrixU();
    out.H_eff = Q * eps.asDiagonal() * Q.adjoint();
    out.H_eff = 0.5 * (out.H_eff + out.H_eff.adjoint().eval());
    std::sort(eps.begin(), eps.end());
    out.quasienergies = eps;
    out.near_branch_cut = near_cut;
    return out;
}

double fidelity_abs(const MatC& F_target, const MatC& F_trial) {
    const double D = static_cast<double>(F_target.rows());
    return std::abs((F_target.adjoint() * F_trial).trace()) / D;
}

double fidelity_real(const MatC& F_target, const MatC& F_trial) {
    const double D = static_cast<double>(F_target.rows());
    return std::real((F_target.adjoint() * F_trial).trace()) / D;
}

MatC compound_matrix(const MatC& U1, int M) {
    const int L = static_cast<int>(U1.rows());
    if (U1.cols() != L) throw config_error("compound_matrix: square input required");
    if (M < 1 || M > L) throw config_error("compound_matrix: M out of range");

    // Occupied-site lists in the hardcore basis order.
    const Basis basis({L, M, Statistics::Hardcore});
    const int D = basis.size();
    std::vector<std::vector<int>> sites(D);
    for (int i = 0; i < D; ++i) {
        for (int l = 0; l < L; ++l)
            if (basis.state(i)[l]) sites[i].push_back(l);
    }

    MatC out(D, D);
    MatC minor(M, M);
    for (int r = 0; r < D; ++r) {
        for (int c = 0; c < D; ++c) {
            for (int a = 0; a < M; ++a)
                for (int b = 0; b < M; ++b) minor(a, b) = U1(sites[r][a], sites[c][b]);
            out(r, c) = minor.determinant();
        }
    }
    return out;
}

}  // namespace floq
