#pragma once

#include "floq/types.hpp"

namespace floq {

struct EigenSystem {
    VecR eigenvalues;    // ascending
    MatC eigenvectors;   // unitary, columns
};

// Dense Hermitian eigendecomposition; throws numeric_error on non-convergence.
EigenSystem eigh(const MatC& H);

// V exp(-i lambda t) V^dagger.
MatC expm_i(const MatC& H, double t);
MatC expm_i(const EigenSystem& es, double t);

// Principal-branch effective Hamiltonian of a unitary one-period propagator:
// eigenphases mapped to quasienergies in (-pi/T, pi/T].  near_branch_cut is
// set when an eigenphase sits within 1e-12 of the cut.
struct LogmResult {
    MatC H_eff;
    VecR quasienergies;  // ascending
    bool near_branch_cut = false;
};

LogmResult logm_unitary(const MatC& F, double T);

// |tr(F_target^dagger F_trial)| / D.
double fidelity_abs(const MatC& F_target, const MatC& F_trial);

// Re tr(F_target^dagger F_trial) / D.
double fidelity_real(const MatC& F_target, const MatC& F_trial);

// M-th exterior power of a single-particle unitary on the hardcore (L, M)
// occupation basis: entries are det of the M x M submatrix picked by the
// occupied sites of row and column states.  Exact propagator of free fermions
// in the M-particle sector.
MatC compound_matrix(const MatC& U1, int M);

}  // namespace floq
