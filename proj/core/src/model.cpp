// model.cpp — Generators of the hierarchical-environment model

#include "hierenv/model.hpp"

#include <cmath>
#include <stdexcept>

namespace hierenv {

namespace {

constexpr Complex kImag{0.0, 1.0};

}  // namespace

void ModelParams::validate() const {
    if (!(omega0 > 0.0) || !std::isfinite(omega0)) {
        throw std::invalid_argument("ModelParams: omega0 must be positive and finite");
    }
    if (gamma0 < 0.0 || kappa < 0.0 || omega < 0.0 || gamma < 0.0) {
        throw std::invalid_argument("ModelParams: rates must be nonnegative");
    }
    if (!std::isfinite(gamma0) || !std::isfinite(kappa) || !std::isfinite(omega) ||
        !std::isfinite(gamma)) {
        throw std::invalid_argument("ModelParams: rates must be finite");
    }
    if (n_cavities < 0) {
        throw std::invalid_argument("ModelParams: n_cavities must be >= 0");
    }
}

Generator reduced_generator(const ModelParams& params) {
    params.validate();
    if (params.topology != Topology::ReducedSymmetric) {
        throw std::invalid_argument("reduced_generator: topology must be ReducedSymmetric");
    }
    const double n = static_cast<double>(params.n_cavities);
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(3, 3);
    m(0, 1) = params.omega0;
    m(1, 0) = params.omega0;
    m(1, 1) = -0.5 * kImag * params.gamma0;
    m(1, 2) = params.kappa;
    m(2, 1) = params.kappa * n;
    m(2, 2) = 2.0 * params.omega - 0.5 * kImag * params.gamma;
    return Generator{std::move(m), Topology::ReducedSymmetric, params};
}

Generator full_generator(const ModelParams& params) {
    params.validate();
    if (params.topology != Topology::RingExplicit) {
        throw std::invalid_argument("full_generator: topology must be RingExplicit");
    }
    const int n = params.n_cavities;
    if (n < 2) {
        throw std::invalid_argument(
            "full_generator: ring lattice needs n_cavities >= 2");
    }
    const Eigen::Index dim = n + 2;
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
    m(0, 1) = params.omega0;
    m(1, 0) = params.omega0;
    m(1, 1) = -0.5 * kImag * params.gamma0;
    for (int i = 0; i < n; ++i) {
        const Eigen::Index c = 2 + i;
        m(1, c) = params.kappa;
        m(c, 1) = params.kappa;
        m(c, c) = -0.5 * kImag * params.gamma;
    }
    if (n == 2) {
        // A two-site ring is a doubled bond: every site keeps the 2*omega
        // neighbor shift of the symmetric mode.
        m(2, 3) += 2.0 * params.omega;
        m(3, 2) += 2.0 * params.omega;
    } else {
        for (int i = 0; i < n; ++i) {
            const Eigen::Index a = 2 + i;
            const Eigen::Index b = 2 + (i + 1) % n;
            m(a, b) += params.omega;
            m(b, a) += params.omega;
        }
    }
    return Generator{std::move(m), Topology::RingExplicit, params};
}

Eigen::VectorXd loss_spectrum(const Generator& gen) {
    Eigen::MatrixXcd b = gen.matrix;
    if (gen.topology == Topology::ReducedSymmetric) {
        const double n = static_cast<double>(gen.params.n_cavities);
        if (n >= 1.0) {
            const double balanced = gen.params.kappa * std::sqrt(n);
            b(1, 2) = balanced;
            b(2, 1) = balanced;
        } else {
            // Empty second layer: the collective coordinate never populates.
            b(1, 2) = 0.0;
            b(2, 1) = 0.0;
        }
    }
    const Eigen::MatrixXcd anti = (b - b.adjoint()) / Complex(0.0, 2.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(anti);
    return solver.eigenvalues();
}

QubitState QubitState::excited() {
    Eigen::Matrix2cd rho = Eigen::Matrix2cd::Zero();
    rho(0, 0) = 1.0;
    QubitState s;
    s.rho_ = rho;
    return s;
}

QubitState QubitState::ground() { return QubitState(); }

QubitState QubitState::plus() {
    Eigen::Matrix2cd rho;
    rho << 0.5, 0.5, 0.5, 0.5;
    QubitState s;
    s.rho_ = rho;
    return s;
}

QubitState QubitState::from_matrix(const Eigen::Matrix2cd& rho) {
    if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-12) {
        throw std::invalid_argument("QubitState: matrix is not Hermitian");
    }
    if (std::abs(rho.trace() - Complex(1.0)) > 1e-12) {
        throw std::invalid_argument("QubitState: trace must be 1");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> solver(rho);
    if (solver.eigenvalues().minCoeff() < -1e-12) {
        throw std::invalid_argument("QubitState: matrix is not positive semidefinite");
    }
    QubitState s;
    s.rho_ = 0.5 * (rho + rho.adjoint());
    return s;
}

QubitState evolve_qubit_state(const QubitState& rho0, Complex g) {
    const double mag = std::abs(g);
    if (mag > 1.0 + 1e-9) {
        throw std::invalid_argument("evolve_qubit_state: |g| > 1 signals blow-up");
    }
    const double p = mag * mag;
    QubitState s;
    s.rho_(0, 0) = rho0.rho11() * p;
    s.rho_(0, 1) = rho0.rho10() * g;
    s.rho_(1, 0) = rho0.rho01() * std::conj(g);
    s.rho_(1, 1) = rho0.rho00() + rho0.rho11() * (1.0 - p);
    return s;
}

}  // namespace hierenv
