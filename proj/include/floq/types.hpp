#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace floq {

using cxd = std::complex<double>;
using MatC = Eigen::MatrixXcd;
using MatR = Eigen::MatrixXd;
using VecC = Eigen::VectorXcd;
using VecR = Eigen::VectorXd;

// All energies are in units of J, times in 1/J, hbar = 1.

enum class Statistics { Bosonic, Hardcore };

struct Sector {
    int L = 1;                                   // site count
    int M = 0;                                   // conserved excitation number
    Statistics stats = Statistics::Bosonic;

    bool operator==(const Sector&) const = default;
};

// Base class for all library errors.
struct floq_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Invalid sectors, mismatched dimensions, malformed inputs.
struct config_error : floq_error {
    using floq_error::floq_error;
};

// Eigensolver non-convergence and similar runtime numerics failures.
struct numeric_error : floq_error {
    using floq_error::floq_error;
};

inline void check_hermitian(const MatC& H, const char* who) {
    const double scale = std::max(1.0, H.cwiseAbs().maxCoeff());
    if ((H - H.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw config_error(std::string(who) + ": matrix is not Hermitian");
}

}  // namespace floq
