#pragma once

#include <string>
#include <vector>

#include "floq/basis.hpp"
#include "floq/types.hpp"

namespace floq {

// Onsite-energy convention for the chain.  Number keeps g_l * n_l; SpinHalf
// maps (g_l/2) sigma^z_l to g_l * n_l - g_l/2, i.e. keeps the additive
// constant.  Constants only shift all quasienergies; they matter solely for
// the phase-sensitive real-trace objective.
enum class OnsiteConvention { Number, SpinHalf };

// One piecewise-constant step of the chain drive.
struct ChainDriveFrame {
    VecR g;     // length L, onsite energies
    VecR J;     // length L-1, nearest-neighbor couplings
    double U = 0.0;  // anharmonicity; ignored in hardcore sectors
};

// Target connectivity: onsite energies G_l and symmetric couplings K_{l,m}.
struct CouplingGraph {
    VecR G;   // length L
    MatR K;   // L x L, symmetric, zero diagonal

    void validate() const;
};

CouplingGraph star_graph(int L, int hub, double K);  // hub is 1-based
CouplingGraph all_to_all(int L, double K);
CouplingGraph ring(int L, double K);

// Instantaneous chain Hamiltonian: nearest-neighbor hopping plus onsite and
// Hubbard terms, restricted to the sector.
MatC build_chain(const Sector& sector, const ChainDriveFrame& frame,
                 OnsiteConvention conv = OnsiteConvention::Number);
MatC build_chain(const Basis& basis, const ChainDriveFrame& frame,
                 OnsiteConvention conv = OnsiteConvention::Number);

// Bosonic target Hamiltonian with arbitrary connectivity K_{l,m}.
MatC build_target_boson(const Sector& sector, const CouplingGraph& graph, double U);
MatC build_target_boson(const Basis& basis, const CouplingGraph& graph, double U);

// Free-fermion image of the spin target in the hardcore occupation basis:
// the hop between l and m carries sign (-1)^(occupied sites strictly between).
MatC build_target_spin_jw(const Sector& sector, const CouplingGraph& graph);
MatC build_target_spin_jw(const Basis& basis, const CouplingGraph& graph);

// Hermitian sum of weighted Pauli strings.  Label position 1 acts on the most
// significant bit of the basis index.
struct PauliTerm {
    double coeff = 0.0;
    std::string labels;  // over {I, X, Y, Z}
};

MatC pauli_to_matrix(const std::vector<PauliTerm>& terms, int n_qubits);

}  // namespace floq
