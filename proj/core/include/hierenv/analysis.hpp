// analysis.hpp — crossover searches and Omega-N phase-diagram sweeps

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hierenv/measures.hpp"
#include "hierenv/model.hpp"

namespace hierenv {

struct SweepSpec {
    double omega_start = 0.0;
    double omega_stop = 0.0;
    double omega_step = 0.05;
    int n_min = 2;
    int n_max = 2;
    ModelParams base;  // gamma0, kappa, gamma (omega/n_cavities are swept)
    double tau = 3.0;
    double dt = 1e-3;
    int workers = 1;

    void validate() const;  // throws std::invalid_argument
    std::vector<double> omega_values() const;
    std::vector<int> n_values() const;
};

struct SweepRow {
    double omega = 0.0;
    int n = 0;
    double nonmarkovianity = 0.0;
    double qsl_ratio = 1.0;
    double survival_at_tau = 1.0;
    bool ok = true;
    std::string error;
};

struct SweepResult {
    SweepSpec spec;
    std::vector<SweepRow> rows;  // sorted by (n, omega)
};

struct CriticalPoint {
    double value = 0.0;
    // More than one threshold crossing inside the bracket; `value` is the
    // boundary of the region adjacent to the bracket start.
    bool multiple_crossings = false;
};

// Scans omega over [lo, hi] at step 0.05 for a crossing of
// nonmarkovianity(omega) through the onset threshold, then bisects the
// first crossing to a bracket below 1e-3. Returns nullopt when the
// classification never changes inside the bracket.
std::optional<CriticalPoint> critical_omega(const ModelParams& base, int n,
                                            double tau, double lo, double hi,
                                            double dt = 1e-3);

// Smallest N in [2, n_max] whose dynamics is non-Markovian, or nullopt.
std::optional<int> critical_n(const ModelParams& base, double omega, double tau,
                              int n_max, double dt = 1e-3);

// Same scan-then-bisect protocol with kappa as the scanned variable.
std::optional<CriticalPoint> critical_kappa(const ModelParams& base, double tau,
                                            double lo, double hi,
                                            double dt = 1e-3);

// Evaluates the measures on every (omega, n) grid point. Rows come back in
// deterministic (n, omega) order and are bit-identical for any worker
// count; per-point failures are recorded in the row, never thrown.
SweepResult sweep(const SweepSpec& spec);

}  // namespace hierenv
