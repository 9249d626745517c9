// measures.cpp — crossing-refined quadrature over the survival probability

#include "hierenv/measures.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace hierenv {

namespace {

// Exact survival derivative on the grid, dP/dt = 2 w0 Im(conj(g) c0).
std::vector<double> rate_series(const AmplitudeTrajectory& traj) {
    std::vector<double> s(traj.size());
    for (std::size_t k = 0; k < traj.size(); ++k) {
        s[k] = 2.0 * traj.qubit_coupling *
               std::imag(std::conj(traj.g[k]) * traj.c0[k]);
    }
    return s;
}

// Cubic Lagrange interpolation of node data through the four nodes around
// time t. At nodes it reproduces the data exactly.
double cubic_at(const std::vector<double>& y, const TimeGrid& grid, double t) {
    const std::size_t last = y.size() - 1;
    const double dt = grid.dt;
    auto kf = static_cast<std::ptrdiff_t>(std::floor(t / dt));
    std::ptrdiff_t i0 = std::clamp<std::ptrdiff_t>(
        kf - 1, 0, static_cast<std::ptrdiff_t>(last) - 3);
    double result = 0.0;
    for (int a = 0; a < 4; ++a) {
        const double ta = grid.time_at(static_cast<std::size_t>(i0 + a));
        double basis = 1.0;
        for (int b = 0; b < 4; ++b) {
            if (b == a) continue;
            const double tb = grid.time_at(static_cast<std::size_t>(i0 + b));
            basis *= (t - tb) / (ta - tb);
        }
        result += y[static_cast<std::size_t>(i0 + a)] * basis;
    }
    return result;
}

// Hermite cubic for P between grid nodes, using the exact derivatives s.
double survival_at(const std::vector<double>& p, const std::vector<double>& s,
                   const TimeGrid& grid, double t) {
    const std::size_t last = p.size() - 1;
    const double dt = grid.dt;
    const double kf = t / dt;
    const auto k = static_cast<std::size_t>(
        std::clamp<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(std::floor(kf)), 0,
                                   static_cast<std::ptrdiff_t>(last) - 1));
    const double x = kf - static_cast<double>(k);
    if (std::abs(x) < 1e-12) return p[k];
    if (std::abs(x - 1.0) < 1e-12) return p[k + 1];
    const double h00 = (1 + 2 * x) * (1 - x) * (1 - x);
    const double h10 = x * (1 - x) * (1 - x);
    const double h01 = x * x * (3 - 2 * x);
    const double h11 = x * x * (x - 1);
    return h00 * p[k] + h10 * dt * s[k] + h01 * p[k + 1] + h11 * dt * s[k + 1];
}

int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

// Times in (0, tau) where the rate changes sign, refined by bisection on
// the cubic interpolant to an interval below 1e-10.
std::vector<double> rate_sign_changes(const std::vector<double>& s,
                                      const TimeGrid& grid, double tau) {
    std::vector<double> crossings;
    const std::size_t k_max =
        std::min(s.size() - 1,
                 static_cast<std::size_t>(std::floor(tau / grid.dt + 1e-9)));
    int last_sign = 0;
    double last_t = 0.0;
    auto bisect = [&](double lo, double hi) {
        double flo = cubic_at(s, grid, lo);
        while (hi - lo > 1e-10) {
            const double mid = 0.5 * (lo + hi);
            const double fm = cubic_at(s, grid, mid);
            if (sign_of(fm) == sign_of(flo) || fm == 0.0) {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
            }
        }
        const double root = 0.5 * (lo + hi);
        if (root > 0.0 && root < tau) crossings.push_back(root);
    };
    auto visit = [&](double t, double value) {
        const int sgn = sign_of(value);
        if (sgn == 0) return;
        if (last_sign != 0 && sgn != last_sign) bisect(last_t, t);
        last_sign = sgn;
        last_t = t;
    };
    for (std::size_t k = 0; k <= k_max; ++k) visit(grid.time_at(k), s[k]);
    if (tau > grid.time_at(k_max) + 1e-12) visit(tau, cubic_at(s, grid, tau));
    return crossings;
}

// Exact integral of the interval's cubic interpolant over [a, b] (Simpson
// is degree-3 exact).
double integrate_cubic(const std::vector<double>& y, const TimeGrid& grid,
                       double a, double b) {
    const double mid = 0.5 * (a + b);
    return (b - a) / 6.0 *
           (cubic_at(y, grid, a) + 4.0 * cubic_at(y, grid, mid) +
            cubic_at(y, grid, b));
}

struct Pieces {
    std::vector<double> bounds;  // 0 = b_0 < b_1 < ... < b_m = tau
};

Pieces monotone_pieces(const std::vector<double>& s, const TimeGrid& grid,
                       double tau) {
    Pieces pieces;
    pieces.bounds.push_back(0.0);
    for (double c : rate_sign_changes(s, grid, tau)) {
        if (c > pieces.bounds.back() + 1e-12) pieces.bounds.push_back(c);
    }
    pieces.bounds.push_back(tau);
    return pieces;
}

void check_tau(const AmplitudeTrajectory& traj, double tau) {
    if (!(tau > 0.0) || !std::isfinite(tau)) {
        throw std::invalid_argument("tau must be positive");
    }
    if (traj.size() < 4) {
        throw std::invalid_argument("trajectory too short for quadrature");
    }
    if (tau > traj.time_at(traj.size() - 1) + 1e-12) {
        throw std::invalid_argument("tau exceeds the trajectory horizon");
    }
}

}  // namespace

double nonmarkovianity(const AmplitudeTrajectory& traj, double tau) {
    check_tau(traj, tau);
    const std::vector<double> s = rate_series(traj);
    const std::vector<double> p = survival_probability(traj);
    const Pieces pieces = monotone_pieces(s, traj.grid, tau);

    double total = 0.0;
    for (std::size_t i = 0; i + 1 < pieces.bounds.size(); ++i) {
        const double a = pieces.bounds[i];
        const double b = pieces.bounds[i + 1];
        if (cubic_at(s, traj.grid, 0.5 * (a + b)) > 0.0) {
            const double inc = survival_at(p, s, traj.grid, b) -
                               survival_at(p, s, traj.grid, a);
            if (inc > 0.0) total += inc;
        }
    }
    return total;
}

double trace_distance(const QubitState& a, const QubitState& b) {
    const Eigen::Matrix2cd diff = a.matrix() - b.matrix();
    Eigen::JacobiSVD<Eigen::Matrix2cd> svd(diff);
    return 0.5 * svd.singularValues().sum();
}

double qsl_ratio_direct(const AmplitudeTrajectory& traj, double tau) {
    check_tau(traj, tau);
    const std::vector<double> s = rate_series(traj);
    const std::vector<double> p = survival_probability(traj);

    // Channel derivative for the excited initial state is diag(dP, -dP);
    // its largest singular value, reattached to the sign of dP, gives a
    // smooth integrand whose absolute pieces are integrable exactly.
    std::vector<double> signed_norm(s.size());
    for (std::size_t k = 0; k < s.size(); ++k) {
        Eigen::Matrix2cd rho_dot = Eigen::Matrix2cd::Zero();
        rho_dot(0, 0) = s[k];
        rho_dot(1, 1) = -s[k];
        Eigen::JacobiSVD<Eigen::Matrix2cd> svd(rho_dot);
        signed_norm[k] = svd.singularValues()(0) * sign_of(s[k]);
    }

    const Pieces pieces = monotone_pieces(s, traj.grid, tau);
    double path_length = 0.0;
    for (std::size_t i = 0; i + 1 < pieces.bounds.size(); ++i) {
        const double a = pieces.bounds[i];
        const double b = pieces.bounds[i + 1];
        // Split at grid nodes so each sub-integral uses one interpolant.
        double lo = a;
        double segment = 0.0;
        std::size_t k = static_cast<std::size_t>(std::floor(lo / traj.grid.dt + 1e-12)) + 1;
        while (true) {
            const double node = traj.grid.time_at(k);
            const double hi = std::min(node, b);
            if (hi > lo) segment += integrate_cubic(signed_norm, traj.grid, lo, hi);
            if (hi >= b) break;
            lo = hi;
            ++k;
        }
        path_length += std::abs(segment);
    }

    const double numer = 1.0 - survival_at(p, s, traj.grid, tau);
    if (path_length < 1e-300) return 1.0;  // no evolution at all
    return numer / path_length;
}

double qsl_ratio_relation(double nonmark, double survival_at_tau) {
    if (nonmark < 0.0 || survival_at_tau < 0.0 || survival_at_tau > 1.0 + 1e-12) {
        throw std::invalid_argument("qsl_ratio_relation: arguments out of range");
    }
    const double numer = 1.0 - survival_at_tau;
    if (numer <= 0.0 && nonmark <= 0.0) return 1.0;  // degenerate: no evolution
    return numer / (2.0 * nonmark + numer);
}

MeasureReport compute_measures(const AmplitudeTrajectory& traj, double tau) {
    check_tau(traj, tau);
    const std::vector<double> s = rate_series(traj);
    const std::vector<double> p = survival_probability(traj);

    MeasureReport report;
    report.nonmarkovianity = nonmarkovianity(traj, tau);
    report.survival_at_tau = survival_at(p, s, traj.grid, tau);
    report.qsl_ratio_direct = qsl_ratio_direct(traj, tau);
    report.qsl_ratio_relation =
        qsl_ratio_relation(report.nonmarkovianity, report.survival_at_tau);
    report.degenerate = report.survival_at_tau >= 1.0 - 1e-12 &&
                        report.nonmarkovianity <= 1e-15;
    if (report.degenerate) {
        report.qsl_ratio_direct = 1.0;
        report.qsl_ratio_relation = 1.0;
    }
    report.consistency_residual =
        std::abs(report.qsl_ratio_direct - report.qsl_ratio_relation);
    return report;
}

}  // namespace hierenv
