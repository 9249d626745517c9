// measures.hpp — BLP non-Markovianity and quantum-speed-limit ratios

#pragma once

#include "hierenv/model.hpp"
#include "hierenv/propagation.hpp"

namespace hierenv {

// Threshold on N(Phi) that classifies a dynamics as non-Markovian in
// crossover searches; shared with the analysis module.
inline constexpr double kNonMarkovianOnset = 1e-6;

struct MeasureReport {
    double nonmarkovianity = 0.0;
    double qsl_ratio_direct = 1.0;
    double qsl_ratio_relation = 1.0;
    double survival_at_tau = 1.0;
    double consistency_residual = 0.0;
    // Set when nothing evolved over [0, tau] (P stays 1, zero derivative
    // norm); both ratios are reported as 1 by convention.
    bool degenerate = false;
};

// Integral of the positive part of dP/dt over [0, tau]: sign changes of
// the rate are located on the grid and refined by bracketed bisection to
// 1e-10, then P-increments over the increasing pieces are summed.
double nonmarkovianity(const AmplitudeTrajectory& traj, double tau);

// Half the sum of singular values of (a - b).
double trace_distance(const QubitState& a, const QubitState& b);

// Deffner-Lutz ratio for the excited initial state:
//   sin^2 B = 1 - P(tau),  Lambda = (1/tau) Int ||drho/dt||_inf dt,
// with ||.||_inf the largest singular value of the channel derivative.
// The degenerate no-evolution case returns 1 (flagged in MeasureReport by
// compute_measures).
double qsl_ratio_direct(const AmplitudeTrajectory& traj, double tau);

// (1 - P) / (2 N + 1 - P); exactly 1 for N = 0 with P < 1. The degenerate
// P = 1, N = 0 case also returns 1.
double qsl_ratio_relation(double nonmark, double survival_at_tau);

MeasureReport compute_measures(const AmplitudeTrajectory& traj, double tau);

}  // namespace hierenv
