#include "floq/targets.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <sstream>
#include <string>

namespace floq {

namespace detail {
extern const char* const lih_target_raw;
}

namespace {

std::vector<int> normalized_subset(std::vector<int> subset) {
    std::sort(subset.begin(), subset.end());
    subset.erase(std::unique(subset.begin(), subset.end()), subset.end());
    return subset;
}

MultilinearPolynomial poly_mul(const MultilinearPolynomial& a, const MultilinearPolynomial& b) {
    MultilinearPolynomial out;
    for (const auto& [sa, ca] : a.coeffs) {
        for (const auto& [sb, cb] : b.coeffs) {
            std::vector<int> u;
            std::set_union(sa.begin(), sa.end(), sb.begin(), sb.end(), std::back_inserter(u));
            out.add_term(u, ca * cb);
        }
    }
    return out;
}

// x XOR y = x + y - 2xy on {0,1}-valued polynomials.
MultilinearPolynomial poly_xor(const MultilinearPolynomial& a, const MultilinearPolynomial& b) {
    MultilinearPolynomial out = a;
    out += b;
    MultilinearPolynomial cross = poly_mul(a, b);
    for (const auto& [s, c] : cross.coeffs) out.add_term(s, -2 * c);
    return out;
}

[[noreturn]] void parse_fail(int line, int col, const std::string& what) {
    throw config_error("clauses: line " + std::to_string(line) + ", column " +
                       std::to_string(col) + ": " + what);
}

}  // namespace

int MultilinearPolynomial::n_vars() const {
    int n = 0;
    for (const auto& [s, c] : coeffs)
        if (!s.empty()) n = std::max(n, s.back());
    return n;
}

void MultilinearPolynomial::add_term(std::vector<int> subset, long long coeff) {
    if (coeff == 0) return;
    subset = normalized_subset(std::move(subset));
    auto it = coeffs.find(subset);
    if (it == coeffs.end()) {
        coeffs.emplace(std::move(subset), coeff);
    } else if ((it->second += coeff) == 0) {
        coeffs.erase(it);
    }
}

long long MultilinearPolynomial::evaluate(const std::vector<int>& assignment) const {
    if (static_cast<int>(assignment.size()) < n_vars())
        throw config_error("polynomial evaluation: assignment shorter than variable count");
    long long value = 0;
    for (const auto& [s, c] : coeffs) {
        bool all_on = true;
        for (int i : s) all_on = all_on && assignment[i - 1] != 0;
        if (all_on) value += c;
    }
    return value;
}

MultilinearPolynomial& MultilinearPolynomial::operator+=(const MultilinearPolynomial& other) {
    for (const auto& [s, c] : other.coeffs) add_term(s, c);
    return *this;
}

void ClauseSystem::validate() const {
    if (n_vars < 1) throw config_error("clause system: needs at least one variable");
    for (const Clause& cl : clauses) {
        if (cl.constant != 0 && cl.constant != 1)
            throw config_error("clause system: constant must be 0 or 1");
        for (const std::vector<int>& m : cl.monomials) {
            if (m.empty()) throw config_error("clause system: empty monomial");
            for (int i : m)
                if (i < 1 || i > n_vars)
                    throw config_error("clause system: variable index out of range");
        }
    }
}

ClauseSystem parse_clause_system(const std::string& text) {
    ClauseSystem sys;
    std::istringstream lines(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(lines, raw)) {
        ++line_no;
        if (!raw.empty() && raw.back() == '\r') raw.pop_back();
        std::size_t i = 0;
        auto skip_ws = [&] { while (i < raw.size() && (raw[i] == ' ' || raw[i] == '\t')) ++i; };
        auto col = [&] { return static_cast<int>(i) + 1; };

        skip_ws();
        if (i == raw.size() || raw[i] == '#') continue;

        Clause clause;
        if (raw[i] != '0' && raw[i] != '1')
            parse_fail(line_no, col(), "expected clause constant '0' or '1'");
        clause.constant = raw[i] - '0';
        ++i;
        if (i < raw.size() && std::isdigit(static_cast<unsigned char>(raw[i])))
            parse_fail(line_no, col(), "clause constant must be a single bit");
        skip_ws();
        if (i == raw.size() || raw[i] != '=') parse_fail(line_no, col(), "expected '='");
        ++i;

        auto parse_factor = [&]() -> int {
            skip_ws();
            if (i == raw.size() || raw[i] != 'a')
                parse_fail(line_no, col(), "expected a variable like 'a1'");
            ++i;
            if (i == raw.size() || !std::isdigit(static_cast<unsigned char>(raw[i])))
                parse_fail(line_no, col(), "expected a variable index after 'a'");
            long idx = 0;
            while (i < raw.size() && std::isdigit(static_cast<unsigned char>(raw[i]))) {
                idx = idx * 10 + (raw[i] - '0');
                if (idx > 1000) parse_fail(line_no, col(), "variable index too large");
                ++i;
            }
            if (idx < 1) parse_fail(line_no, col(), "variable indices start at 1");
            return static_cast<int>(idx);
        };

        while (true) {
            std::vector<int> monomial{parse_factor()};
            while (true) {
                skip_ws();
                if (i < raw.size() && raw[i] == '*') {
                    ++i;
                    monomial.push_back(parse_factor());
                    continue;
                }
                break;
            }
            clause.monomials.push_back(normalized_subset(std::move(monomial)));
            if (i == raw.size()) break;
            if (raw[i] != '+') parse_fail(line_no, col(), "expected '+', '*', or end of line");
            ++i;
        }
        for (const std::vector<int>& m : clause.monomials)
            sys.n_vars = std::max(sys.n_vars, m.back());
        sys.clauses.push_back(std::move(clause));
    }
    if (sys.clauses.empty()) throw config_error("clauses: no clauses found");
    sys.validate();
    return sys;
}

ClauseSystem builtin_3sat() {
    ClauseSystem sys;
    sys.n_vars = 3;
    sys.clauses = {
        Clause{1, {{2}, {3}, {1, 3}}},
        Clause{1, {{1}, {3}, {1, 2}}},
        Clause{0, {{1}, {2}, {2, 3}}},
    };
    return sys;
}

MultilinearPolynomial clause_objective(const Clause& clause) {
    MultilinearPolynomial p;
    p.add_term({}, clause.constant);
    for (const std::vector<int>& m : clause.monomials) {
        MultilinearPolynomial q;
        q.add_term(m, 1);
        p = poly_xor(p, q);
    }
    return p;
}

MultilinearPolynomial system_objective(const ClauseSystem& system) {
    system.validate();
    MultilinearPolynomial total;
    for (const Clause& cl : system.clauses) total += clause_objective(cl);
    return total;
}

VariableEncoding VariableEncoding::identity(int n_vars) {
    VariableEncoding enc;
    for (int i = 1; i <= n_vars; ++i) {
        enc.sign.push_back(1);
        enc.qubit.push_back(i);
    }
    return enc;
}

VariableEncoding VariableEncoding::builtin3() {
    VariableEncoding enc = identity(3);
    enc.sign[2] = -1;
    return enc;
}

void VariableEncoding::validate(int n_vars) const {
    const int n = static_cast<int>(sign.size());
    if (static_cast<int>(qubit.size()) != n)
        throw config_error("variable encoding: sign and qubit lists must match");
    if (n < n_vars) throw config_error("variable encoding: does not cover all variables");
    std::vector<bool> used(n, false);
    for (int q : qubit) {
        if (q < 1 || q > n || used[q - 1])
            throw config_error("variable encoding: qubit assignment must be a bijection");
        used[q - 1] = true;
    }
    for (int s : sign)
        if (s != 1 && s != -1) throw config_error("variable encoding: signs must be +1 or -1");
}

std::vector<PauliTerm> objective_to_pauli(const MultilinearPolynomial& poly,
                                          const VariableEncoding& enc, bool drop_identity) {
    enc.validate(poly.n_vars());
    const int n = static_cast<int>(enc.sign.size());

    std::map<std::vector<int>, double> xcoeffs;  // label subsets -> weight
    for (const auto& [subset, coeff] : poly.coeffs) {
        const int k = static_cast<int>(subset.size());
        const double base = static_cast<double>(coeff) / static_cast<double>(1ll << k);
        for (unsigned mask = 0; mask < (1u << k); ++mask) {
            double w = base;
            std::vector<int> labels;
            for (int b = 0; b < k; ++b) {
                if (mask & (1u << b)) {
                    const int var = subset[b];
                    w *= enc.sign[var - 1];
                    labels.push_back(enc.qubit[var - 1]);
                }
            }
            std::sort(labels.begin(), labels.end());
            xcoeffs[labels] += w;
        }
    }

    std::vector<PauliTerm> terms;
    for (const auto& [labels, w] : xcoeffs) {
        if (w == 0.0) continue;
        if (labels.empty() && drop_identity) continue;
        PauliTerm term;
        term.coeff = w;
        term.labels.assign(n, 'I');
        for (int q : labels) term.labels[q - 1] = 'X';
        terms.push_back(std::move(term));
    }
    return terms;
}

MatC sat_hamiltonian(double omega, bool drop_identity) {
    const std::vector<PauliTerm> terms =
        objective_to_pauli(system_objective(builtin_3sat()), VariableEncoding::builtin3(),
                           drop_identity);
    return omega * pauli_to_matrix(terms, 3);
}

std::array<int, 3> readout_assignment(const VecC& state) {
    return readout_assignment(state, VariableEncoding::builtin3());
}

std::array<int, 3> readout_assignment(const VecC& state, const VariableEncoding& enc) {
    if (state.size() != 8) throw config_error("readout: expected a dim-8 state");
    if (std::abs(state.norm() - 1.0) > 1e-8)
        throw config_error("readout: state must be normalized");
    enc.validate(3);
    if (enc.sign.size() != 3) throw config_error("readout: encoding must cover exactly 3 qubits");

    // Correlator route: in the single-excitation basis, sites l and m = l + d
    // paired by flipping one address bit carry the XX + YY two-point sums.
    std::array<double, 3> a_corr{};
    for (int v = 0; v < 3; ++v) {
        const int bit = 3 - enc.qubit[v];  // 0-based address bit flipped by X on this label
        double corr = 0.0;
        for (int b = 0; b < 8; ++b) {
            if (b & (1 << bit)) continue;
            corr += 2.0 * (std::conj(state(b)) * state(b | (1 << bit))).real();
        }
        a_corr[v] = 0.5 * (1.0 + enc.sign[v] * 2.0 * corr);
    }

    // Amplitude route: Hadamard transform, then read the dominant X-basis index.
    VecC phi = VecC::Zero(8);
    const double h = 1.0 / std::sqrt(8.0);
    for (int x = 0; x < 8; ++x) {
        cxd acc = 0.0;
        for (int z = 0; z < 8; ++z) {
            const int par = std::popcount(static_cast<unsigned>(x & z)) & 1;
            acc += (par ? -h : h) * state(z);
        }
        phi(x) = acc;
    }
    int arg_max = 0;
    double best = -1.0, second = -1.0;
    for (int x = 0; x < 8; ++x) {
        const double m = std::abs(phi(x));
        if (m > best) {
            second = best;
            best = m;
            arg_max = x;
        } else if (m > second) {
            second = m;
        }
    }

    std::ostringstream raw;
    raw << "correlators (" << a_corr[0] << ", " << a_corr[1] << ", " << a_corr[2]
        << "), top x-basis weights " << best << " at index " << arg_max << " vs " << second;

    if (best - second < 1e-9)
        throw ambiguity_error("readout: no dominant x-basis amplitude; " + raw.str());

    std::array<int, 3> bits_corr{}, bits_amp{};
    for (int v = 0; v < 3; ++v) {
        if (std::abs(a_corr[v] - 0.5) < 1e-3)
            throw ambiguity_error("readout: correlator for a" + std::to_string(v + 1) +
                                  " is indefinite; " + raw.str());
        bits_corr[v] = a_corr[v] > 0.5 ? 1 : 0;
        const int bit = 3 - enc.qubit[v];
        const int mu = (arg_max & (1 << bit)) ? -1 : 1;
        bits_amp[v] = (1 + enc.sign[v] * mu) / 2;
    }
    if (bits_corr != bits_amp)
        throw ambiguity_error("readout: correlator and amplitude routes disagree; " + raw.str());
    return bits_corr;
}

std::string lih_target_text() { return detail::lih_target_raw; }

MatC lih_hamiltonian() {
    std::istringstream in(lih_target_text());
    MatR raw(16, 16);
    for (int r = 0; r < 16; ++r) {
        for (int c = 0; c < 16; ++c) {
            if (!(in >> raw(r, c))) throw numeric_error("embedded target table is truncated");
        }
    }
    double extra;
    if (in >> extra) throw numeric_error("embedded target table has trailing entries");
    const MatR sym = 0.5 * (raw + raw.transpose());
    return sym.cast<cxd>();
}

MatC diag_initial_hamiltonian(int n_qubits, double omega, bool centered) {
    if (n_qubits < 1 || n_qubits > 16)
        throw config_error("diagonal initial term: qubit count must be in [1, 16]");
    const int D = 1 << n_qubits;
    const double shift = centered ? 0.5 * n_qubits : 0.0;
    MatC H = MatC::Zero(D, D);
    for (int i = 0; i < D; ++i)
        H(i, i) = omega * (std::popcount(static_cast<unsigned>(i)) - shift);
    return H;
}

}  // namespace floq
