// propagation.hpp — Exact linear propagation of the survival amplitude

#pragma once

#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "hierenv/model.hpp"

namespace hierenv {

struct TimeGrid {
    double t_end = 0.0;
    double dt = 1e-3;  // output step, in units 1/omega0

    // Throws std::invalid_argument unless dt > 0, t_end > 0 and
    // t_end/dt <= 1e7.
    void validate() const;

    // Number of steps K such that K*dt covers [0, t_end].
    std::size_t steps() const;
    std::size_t size() const { return steps() + 1; }
    double time_at(std::size_t k) const { return static_cast<double>(k) * dt; }
};

// Survival amplitude g(t) plus the auxiliary amplitudes needed downstream:
// c0 (first-layer cavity) and csum = sum_n c_n (collective second layer).
struct AmplitudeTrajectory {
    TimeGrid grid;
    std::vector<Complex> g;
    std::vector<Complex> c0;
    std::vector<Complex> csum;
    // Atom-m0 entry of the generator; gives the exact survival derivative
    // dP/dt = 2*qubit_coupling*Im(conj(g)*c0).
    double qubit_coupling = 1.0;

    std::size_t size() const { return g.size(); }
    double time_at(std::size_t k) const { return grid.time_at(k); }

    // Checks the excited-start invariants g[0]=1, c0[0]=0, csum[0]=0 and
    // |g[k]| <= 1 + 1e-9; throws std::logic_error.
    void validate() const;
};

class PropagationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// psi(k*dt) = exp(-i M k dt) psi(0). Eigendecomposition is the primary
// path (exact for a constant generator); when the eigenvector matrix is
// ill-conditioned (cond >= 1e8) an embedded Dormand-Prince 5(4) integrator
// with relative tolerance 1e-12 takes over. Throws PropagationError on
// integrator failure or norm growth beyond 1 + 1e-6.
AmplitudeTrajectory propagate(const Generator& gen, const TimeGrid& grid,
                              const Eigen::VectorXcd& initial);

// Standard run: atom excited, all cavities empty; topology picked from
// params.
AmplitudeTrajectory simulate(const ModelParams& params, const TimeGrid& grid);

struct ClosedFormAmplitude {
    Complex value;
    // Set when two roots of the characteristic cubic sit closer than 1e-9
    // and the residue formula was abandoned for direct integration.
    bool used_fallback = false;
};

// g(t) = sum_j R_j exp(-i lambda_j t) from the characteristic cubic of the
// reduced generator (Cardano roots, partial-fraction residues of the
// resolvent).
ClosedFormAmplitude g_closed_form(const ModelParams& params, double t);

// P[k] = |g[k]|^2, clamped to [0, 1].
std::vector<double> survival_probability(const AmplitudeTrajectory& traj);

// Fixed-step variant of the embedded pair (no error control); exposed for
// convergence checks.
Eigen::VectorXcd integrate_fixed(const Eigen::MatrixXcd& m, Eigen::VectorXcd psi,
                                 double t0, double t1, int n_steps);

}  // namespace hierenv
