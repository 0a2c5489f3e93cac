#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "floq/operators.hpp"
#include "floq/types.hpp"

namespace floq {

// Signals that a readout could not be rounded to a definite bit string.
struct ambiguity_error : floq_error {
    using floq_error::floq_error;
};

// Integer-coefficient polynomial over binary variables a_i in {0,1}, kept in
// multilinear normal form: keys are sorted duplicate-free 1-based variable
// subsets (the empty subset is the constant), zero coefficients absent.
struct MultilinearPolynomial {
    std::map<std::vector<int>, long long> coeffs;

    int n_vars() const;
    void add_term(std::vector<int> subset, long long coeff);
    long long evaluate(const std::vector<int>& assignment) const;  // bits, a_i = assignment[i-1]
    MultilinearPolynomial& operator+=(const MultilinearPolynomial& other);
};

// One equation over Z2: constant = sum of monomials (mod 2).
struct Clause {
    int constant = 0;                        // 0 or 1
    std::vector<std::vector<int>> monomials; // sorted 1-based variable subsets
};

struct ClauseSystem {
    int n_vars = 0;
    std::vector<Clause> clauses;

    void validate() const;
};

// Text format: one clause per line, `bit = term + term + ...` with terms like
// `a1` or `a1*a3`; blank lines and `#` comments skipped.  Rejects anything
// else with a line/column diagnostic.
ClauseSystem parse_clause_system(const std::string& text);

// The three boolean equations of the worked example.
ClauseSystem builtin_3sat();

// Violation indicator of one clause as a polynomial over the integers:
// evaluates to 0 on satisfying assignments and 1 otherwise.
MultilinearPolynomial clause_objective(const Clause& clause);

// Sum of clause objectives: counts violated clauses per assignment.
MultilinearPolynomial system_objective(const ClauseSystem& system);

// Affine map a_i -> (1 + sign_i * X_{qubit_i}) / 2.  Qubit labels are 1-based
// positions in the Pauli string; position 1 acts on the most significant bit.
struct VariableEncoding {
    std::vector<int> sign;   // +1 or -1 per variable
    std::vector<int> qubit;  // bijective label assignment

    static VariableEncoding identity(int n_vars);  // all +1, variable i on label i
    static VariableEncoding builtin3();              // signs (+1, +1, -1) on labels (1, 2, 3)
    void validate(int n_vars) const;
};

// Substitute the affine map, expand, and collect into weighted X-strings.
// The identity term only shifts the spectrum and is dropped by default.
std::vector<PauliTerm> objective_to_pauli(const MultilinearPolynomial& poly,
                                          const VariableEncoding& enc,
                                          bool drop_identity = true);

// omega * cost operator of the worked three-clause system (8 x 8).
MatC sat_hamiltonian(double omega = 1.0, bool drop_identity = true);

// Decode a normalized single-excitation state (amplitudes over |1_l>, eight
// sites) into the assignment (a1, a2, a3).  Two independent routes must
// agree: the two-point correlator formulas and the dominant amplitude after a
// Hadamard transform; disagreement or an indefinite bit raises
// ambiguity_error carrying both raw readouts.
std::array<int, 3> readout_assignment(const VecC& state);
std::array<int, 3> readout_assignment(const VecC& state, const VariableEncoding& enc);

// The embedded 16 x 16 LiH target, symmetrized; and its raw data table.
MatC lih_hamiltonian();
std::string lih_target_text();

// omega * diag(Hamming weight of the basis index); eigenvalue multiplicities
// follow binomial coefficients.  `centered` subtracts n/2 so the spectrum is
// symmetric about zero, which keeps quasienergies away from the branch cut.
MatC diag_initial_hamiltonian(int n_qubits, double omega, bool centered = false);

}  // namespace floq
