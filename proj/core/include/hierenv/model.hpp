// model.hpp — Parameter space, single-excitation generators, and the qubit channel

#pragma once

#include <complex>

#include <Eigen/Dense>

namespace hierenv {

using Complex = std::complex<double>;

enum class Topology {
    ReducedSymmetric,  // 3-variable collective model (g, c0, C), C = sum_n c_n
    RingExplicit,      // full lattice (atom, m0, m_1..m_N) with ring adjacency
};

// All rates and couplings are measured in units of the qubit-m0 coupling
// omega0; time runs in 1/omega0. Bare mode frequencies are resonant and
// removed by the rotating frame, so only couplings and loss rates remain.
struct ModelParams {
    double omega0 = 1.0;  // qubit-m0 coupling (the global rate unit)
    double gamma0 = 0.0;  // m0 loss rate
    double kappa = 0.0;   // m0-m_n coupling, identical for every n
    double omega = 0.0;   // nearest-neighbor coupling in the second layer
    double gamma = 0.0;   // second-layer loss rate, uniform across n
    int n_cavities = 0;   // number of second-layer cavities N
    Topology topology = Topology::ReducedSymmetric;

    // Throws std::invalid_argument on negative rates or n_cavities < 0.
    void validate() const;

    // gamma0 > 4*omega0: overdamped qubit-m0 dynamics (Markovian baseline).
    bool weak_coupling() const { return gamma0 > 4.0 * omega0; }

    // With no second layer acting the model is the plain damped
    // Jaynes-Cummings qubit + lossy cavity.
    bool baseline() const { return n_cavities == 0 || kappa == 0.0; }
};

// M in  i dpsi/dt = M psi.  Couplings are real symmetric entries, losses
// sit on the diagonal as -i*Gamma/2.
struct Generator {
    Eigen::MatrixXcd matrix;
    Topology topology = Topology::ReducedSymmetric;
    ModelParams params;

    Eigen::Index dimension() const { return matrix.rows(); }

    // Atom-m0 entry; converts c0 into the exact derivative of g.
    double qubit_coupling() const { return params.omega0; }
};

// 3x3 generator on (g, c0, C):
//   row 1: (0,       omega0,        0)
//   row 2: (omega0,  -i*gamma0/2,   kappa)
//   row 3: (0,       kappa*N,       2*omega - i*gamma/2)
Generator reduced_generator(const ModelParams& params);

// (N+2)x(N+2) generator in the basis (atom, m0, m_1..m_N). Requires
// n_cavities >= 2. At N = 2 the single ring bond is doubled so the
// symmetric mode sees the same 2*omega shift as for N >= 3, matching the
// collective model for symmetric initial data.
Generator full_generator(const ModelParams& params);

// Eigenvalues of the anti-Hermitian part (B - B^+)/(2i), where B is the
// generator rewritten so the collective coordinate carries unit norm
// weight (C -> C/sqrt(N), turning the kappa/kappa*N pair into a symmetric
// kappa*sqrt(N)). Losses only: every entry must be <= 0.
Eigen::VectorXd loss_spectrum(const Generator& gen);

// Qubit density matrix in the basis {|1>, |0>}; entry (0,0) is rho11.
class QubitState {
public:
    QubitState() : rho_(Eigen::Matrix2cd::Zero()) { rho_(1, 1) = 1.0; }

    static QubitState excited();
    static QubitState ground();
    static QubitState plus();  // (|1> + |0>)/sqrt(2) projector

    // Validates Hermiticity, unit trace and positivity (1e-12 tolerances);
    // throws std::invalid_argument.
    static QubitState from_matrix(const Eigen::Matrix2cd& rho);

    const Eigen::Matrix2cd& matrix() const { return rho_; }
    Complex rho11() const { return rho_(0, 0); }
    Complex rho10() const { return rho_(0, 1); }
    Complex rho01() const { return rho_(1, 0); }
    Complex rho00() const { return rho_(1, 1); }

private:
    friend QubitState evolve_qubit_state(const QubitState& rho0, Complex g);
    Eigen::Matrix2cd rho_;
};

// Qubit channel at survival amplitude g:
//   rho11 -> rho11(0)|g|^2,  rho10 -> rho10(0) g,  rho01 -> rho01(0) g*,
//   rho00 -> rho00(0) + rho11(0)(1 - |g|^2).
// Rejects |g| > 1 + 1e-9 (an amplitude that large signals integrator
// blow-up, not physics).
QubitState evolve_qubit_state(const QubitState& rho0, Complex g);

}  // namespace hierenv
