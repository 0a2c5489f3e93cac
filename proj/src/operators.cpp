#include "floq/operators.hpp"

#include <cmath>

namespace floq {

void CouplingGraph::validate() const {
    const int L = static_cast<int>(G.size());
    if (K.rows() != L || K.cols() != L)
        throw config_error("coupling graph: K must be L x L");
    for (int l = 0; l < L; ++l) {
        if (K(l, l) != 0.0)
            throw config_error("coupling graph: K diagonal must be zero");
        for (int m = 0; m < l; ++m)
            if (K(l, m) != K(m, l))
                throw config_error("coupling graph: K must be symmetric");
    }
}

CouplingGraph star_graph(int L, int hub, double K) {
    if (hub < 1 || hub > L) throw config_error("star_graph: hub out of range");
    CouplingGraph g{VecR::Zero(L), MatR::Zero(L, L)};
    for (int m = 0; m < L; ++m) {
        if (m == hub - 1) continue;
        g.K(hub - 1, m) = g.K(m, hub - 1) = K;
    }
    return g;
}

CouplingGraph all_to_all(int L, double K) {
    CouplingGraph g{VecR::Zero(L), MatR::Constant(L, L, K)};
    g.K.diagonal().setZero();
    return g;
}

CouplingGraph ring(int L, double K) {
    if (L < 3) throw config_error("ring: needs at least 3 sites");
    CouplingGraph g{VecR::Zero(L), MatR::Zero(L, L)};
    for (int l = 0; l + 1 < L; ++l) g.K(l, l + 1) = g.K(l + 1, l) = K;
    g.K(0, L - 1) = g.K(L - 1, 0) = K;
    return g;
}

MatC build_chain(const Basis& basis, const ChainDriveFrame& frame, OnsiteConvention conv) {
    const Sector& sec = basis.sector();
    if (frame.g.size() != sec.L || frame.J.size() != sec.L - 1)
        throw config_error("build_chain: frame lengths do not match sector L");
    const bool hardcore = sec.stats == Statistics::Hardcore;
    if (!hardcore && !std::isfinite(frame.U))
        throw config_error("build_chain: bosonic sectors require finite U");

    const int D = basis.size();
    MatC H = MatC::Zero(D, D);
    for (int i = 0; i < D; ++i) {
        const OccupationState& s = basis.state(i);
        double diag = 0.0;
        for (int l = 0; l < sec.L; ++l) {
            diag += frame.g[l] * s[l];
            if (!hardcore) diag += 0.5 * frame.U * s[l] * (s[l] - 1);
        }
        if (conv == OnsiteConvention::SpinHalf) diag -= 0.5 * frame.g.sum();
        H(i, i) = diag;

        for (int l = 0; l + 1 < sec.L; ++l) {
            if (s[l + 1] < 1) continue;
            if (hardcore && s[l] == 1) continue;
            OccupationState t = s;
            ++t[l];
            --t[l + 1];
            const int j = basis.index_of(t);
            const double amp = frame.J[l] * std::sqrt(double(s[l] + 1) * s[l + 1]);
            H(j, i) += amp;
            H(i, j) += amp;
        }
    }
    return H;
}

MatC build_chain(const Sector& sector, const ChainDriveFrame& frame, OnsiteConvention conv) {
    return build_chain(Basis(sector), frame, conv);
}

MatC build_target_boson(const Basis& basis, const CouplingGraph& graph, double U) {
    const Sector& sec = basis.sector();
    if (sec.stats != Statistics::Bosonic)
        throw config_error("build_target_boson: bosonic sectors only");
    if (graph.G.size() != sec.L)
        throw config_error("build_target_boson: graph does not match sector L");
    graph.validate();

    const int D = basis.size();
    MatC H = MatC::Zero(D, D);
    for (int i = 0; i < D; ++i) {
        const OccupationState& s = basis.state(i);
        double diag = 0.0;
        for (int l = 0; l < sec.L; ++l)
            diag += graph.G[l] * s[l] + 0.5 * U * s[l] * (s[l] - 1);
        H(i, i) = diag;

        for (int l = 0; l < sec.L; ++l) {
            for (int m = 0; m < sec.L; ++m) {
                if (l == m || graph.K(l, m) == 0.0 || s[m] < 1) continue;
                OccupationState t = s;
                ++t[l];
                --t[m];
                const int j = basis.index_of(t);
                H(j, i) += graph.K(l, m) * std::sqrt(double(s[l] + 1) * s[m]);
            }
        }
    }
    return H;
}

MatC build_target_boson(const Sector& sector, const CouplingGraph& graph, double U) {
    return build_target_boson(Basis(sector), graph, U);
}

MatC build_target_spin_jw(const Basis& basis, const CouplingGraph& graph) {
    const Sector& sec = basis.sector();
    if (sec.stats != Statistics::Hardcore)
        throw config_error("build_target_spin_jw: hardcore sectors only");
    if (graph.G.size() != sec.L)
        throw config_error("build_target_spin_jw: graph does not match sector L");
    graph.validate();

    const int D = basis.size();
    MatC H = MatC::Zero(D, D);
    for (int i = 0; i < D; ++i) {
        const OccupationState& s = basis.state(i);
        double diag = 0.0;
        for (int l = 0; l < sec.L; ++l) diag += graph.G[l] * s[l];
        H(i, i) = diag;

        for (int l = 0; l < sec.L; ++l) {
            for (int m = 0; m < sec.L; ++m) {
                if (l == m || graph.K(l, m) == 0.0) continue;
                if (s[m] != 1 || s[l] != 0) continue;
                OccupationState t = s;
                t[l] = 1;
                t[m] = 0;
                const int j = basis.index_of(t);
                int between = 0;
                for (int q = std::min(l, m) + 1; q < std::max(l, m); ++q) between += s[q];
                const double sign = between % 2 == 0 ? 1.0 : -1.0;
                H(j, i) += sign * graph.K(l, m);
            }
        }
    }
    return H;
}

MatC build_target_spin_jw(const Sector& sector, const CouplingGraph& graph) {
    return build_target_spin_jw(Basis(sector), graph);
}

MatC pauli_to_matrix(const std::vector<PauliTerm>& terms, int n_qubits) {
    if (n_qubits < 1 || n_qubits > 16)
        throw config_error("pauli_to_matrix: n_qubits out of range");
    const int D = 1 << n_qubits;
    MatC H = MatC::Zero(D, D);

    MatC pauli[4] = {MatC::Identity(2, 2), MatC::Zero(2, 2), MatC::Zero(2, 2), MatC::Zero(2, 2)};
    pauli[1] << 0, 1, 1, 0;                                  // X
    pauli[2] << 0, cxd(0, -1), cxd(0, 1), 0;                 // Y
    pauli[3] << 1, 0, 0, -1;                                 // Z

    for (const PauliTerm& term : terms) {
        if (static_cast<int>(term.labels.size()) != n_qubits)
            throw config_error("pauli_to_matrix: label length does not match n_qubits");
        MatC acc = MatC::Identity(1, 1);
        // accumulate right to left so label position 1 ends up outermost (MSB)
        for (auto it = term.labels.rbegin(); it != term.labels.rend(); ++it) {
            const char c = *it;
            int p;
            switch (c) {
                case 'I': p = 0; break;
                case 'X': p = 1; break;
                case 'Y': p = 2; break;
                case 'Z': p = 3; break;
                default: throw config_error("pauli_to_matrix: bad label character");
            }
            MatC next(acc.rows() * 2, acc.cols() * 2);
            next.topLeftCorner(acc.rows(), acc.cols()) = pauli[p](0, 0) * acc;
            next.topRightCorner(acc.rows(), acc.cols()) = pauli[p](0, 1) * acc;
            next.bottomLeftCorner(acc.rows(), acc.cols()) = pauli[p](1, 0) * acc;
            next.bottomRightCorner(acc.rows(), acc.cols()) = pauli[p](1, 1) * acc;
            acc = std::move(next);
        }
        H += term.coeff * acc;
    }
    return H;
}

}  // namespace floq
