#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "hierenv/measures.hpp"
#include "hierenv/model.hpp"
#include "hierenv/propagation.hpp"

using namespace hierenv;

namespace {

ModelParams make_params(double gamma0, double kappa, double omega, double gamma,
                        int n) {
    ModelParams p;
    p.gamma0 = gamma0;
    p.kappa = kappa;
    p.omega = omega;
    p.gamma = gamma;
    p.n_cavities = n;
    return p;
}

AmplitudeTrajectory run(const ModelParams& p, double tau = 3.0, double dt = 1e-3) {
    return simulate(p, TimeGrid{tau, dt});
}

Eigen::Matrix2cd random_density(std::mt19937& rng) {
    std::normal_distribution<double> dist;
    Eigen::Matrix2cd a;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) a(i, j) = Complex(dist(rng), dist(rng));
    }
    Eigen::Matrix2cd rho = a * a.adjoint();
    return rho / rho.trace();
}

constexpr double kStrongBaselineNonmark = 0.7146874;
constexpr double kStrongBaselineRatio = 0.1663933;

}  // namespace

TEST_CASE("nonmarkovianity baselines") {
    SUBCASE("strong coupling accumulates one backflow interval") {
        const double v = nonmarkovianity(run(make_params(0.2, 0, 0, 0, 0)), 3.0);
        CHECK(v == doctest::Approx(0.714).epsilon(0.015));
        CHECK(v == doctest::Approx(kStrongBaselineNonmark).epsilon(1e-5));
    }
    SUBCASE("weak coupling is Markovian") {
        CHECK(nonmarkovianity(run(make_params(5, 0, 0, 0, 0)), 3.0) == 0.0);
    }
}

TEST_CASE("nonmarkovianity onset in the weak regime") {
    // Knife-edge grid points around the crossover at gamma0 = kappa = gamma = 5.
    CHECK(nonmarkovianity(run(make_params(5, 5, 1.5, 5, 3)), 3.0) == 0.0);
    CHECK(nonmarkovianity(run(make_params(5, 5, 1.5, 5, 4)), 3.0) == 0.0);
    CHECK(nonmarkovianity(run(make_params(5, 5, 1.5, 5, 5)), 3.0) ==
          doctest::Approx(5.4618e-4).epsilon(1e-3));
    CHECK(nonmarkovianity(run(make_params(5, 5, 1.0, 5, 3)), 3.0) == 0.0);
    CHECK(nonmarkovianity(run(make_params(5, 5, 1.0, 5, 4)), 3.0) ==
          doctest::Approx(2.2454e-4).epsilon(1e-3));
    CHECK(nonmarkovianity(run(make_params(5, 5, 0.0, 5, 4)), 3.0) ==
          doctest::Approx(1.0641e-3).epsilon(1e-3));
}

TEST_CASE("nonmarkovianity is stable under grid refinement") {
    for (const auto& p : {make_params(0.2, 0, 0, 0, 0), make_params(5, 5, 1, 5, 6)}) {
        const double coarse = nonmarkovianity(run(p, 3.0, 1e-3), 3.0);
        const double fine = nonmarkovianity(run(p, 3.0, 5e-4), 3.0);
        CHECK(std::abs(coarse - fine) < 1e-8);
    }
}

TEST_CASE("nonmarkovianity vanishes exactly for monotone decay") {
    for (const auto& p : {make_params(5, 0, 0, 0, 0), make_params(8, 2, 3, 6, 2)}) {
        const AmplitudeTrajectory traj = run(p);
        const auto surv = survival_probability(traj);
        bool monotone = true;
        for (std::size_t k = 1; k < surv.size(); ++k) {
            if (surv[k] > surv[k - 1] + 1e-12) monotone = false;
        }
        const double v = nonmarkovianity(traj, 3.0);
        CHECK(monotone == (v == 0.0));
    }
}

TEST_CASE("trace distance") {
    const QubitState up = QubitState::excited();
    const QubitState down = QubitState::ground();
    CHECK(trace_distance(up, up) == 0.0);
    CHECK(trace_distance(up, down) == doctest::Approx(1.0).epsilon(1e-14));

    SUBCASE("evolved orthogonal pair separates by |g|^2") {
        for (double mag : {0.3, 0.7, 1.0}) {
            const Complex g = std::polar(mag, 0.4);
            const double d =
                trace_distance(evolve_qubit_state(up, g), evolve_qubit_state(down, g));
            CHECK(d == doctest::Approx(mag * mag).epsilon(1e-12));
        }
    }
    SUBCASE("metric on sampled triples") {
        std::mt19937 rng(5);
        for (int i = 0; i < 50; ++i) {
            const QubitState a = QubitState::from_matrix(random_density(rng));
            const QubitState b = QubitState::from_matrix(random_density(rng));
            const QubitState c = QubitState::from_matrix(random_density(rng));
            CHECK(trace_distance(a, a) < 1e-12);
            CHECK(std::abs(trace_distance(a, b) - trace_distance(b, a)) < 1e-12);
            CHECK(trace_distance(a, c) <=
                  trace_distance(a, b) + trace_distance(b, c) + 1e-12);
            CHECK(trace_distance(a, b) <= 1.0 + 1e-12);
        }
    }
    SUBCASE("the qubit channel is a trace-distance contraction") {
        std::mt19937 rng(6);
        std::uniform_real_distribution<double> mag(0.0, 1.0);
        std::uniform_real_distribution<double> phase(0.0, 2.0 * M_PI);
        for (int i = 0; i < 100; ++i) {
            const QubitState a = QubitState::from_matrix(random_density(rng));
            const QubitState b = QubitState::from_matrix(random_density(rng));
            const Complex g = std::polar(mag(rng), phase(rng));
            CHECK(trace_distance(evolve_qubit_state(a, g), evolve_qubit_state(b, g)) <=
                  trace_distance(a, b) + 1e-12);
        }
    }
}

TEST_CASE("qsl ratio baselines") {
    SUBCASE("strong coupling speeds up") {
        const AmplitudeTrajectory traj = run(make_params(0.2, 0, 0, 0, 0));
        const double direct = qsl_ratio_direct(traj, 3.0);
        CHECK(direct == doctest::Approx(0.166).epsilon(0.03));
        CHECK(direct == doctest::Approx(kStrongBaselineRatio).epsilon(1e-5));
    }
    SUBCASE("weak coupling rides the fastest path already") {
        const AmplitudeTrajectory traj = run(make_params(5, 0, 0, 0, 0));
        CHECK(std::abs(qsl_ratio_direct(traj, 3.0) - 1.0) < 1e-9);
        const double n = nonmarkovianity(traj, 3.0);
        const auto surv = survival_probability(traj);
        CHECK(qsl_ratio_relation(n, surv.back()) == 1.0);
    }
}

TEST_CASE("qsl relation formula") {
    CHECK(qsl_ratio_relation(0.714, 0.714) ==
          doctest::Approx(0.286 / 1.714).epsilon(1e-12));
    CHECK(qsl_ratio_relation(0.0, 0.3) == 1.0);
    CHECK(qsl_ratio_relation(1.0, 0.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(qsl_ratio_relation(0.0, 1.0) == 1.0);  // degenerate: no evolution
    CHECK_THROWS_AS(qsl_ratio_relation(-0.1, 0.5), std::invalid_argument);
}

TEST_CASE("both qsl routes agree") {
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> rate(0.0, 8.0);
    std::uniform_real_distribution<double> coupling(0.0, 6.0);
    std::uniform_real_distribution<double> hop(0.0, 4.0);
    std::uniform_int_distribution<int> nn(0, 10);
    for (int i = 0; i < 20; ++i) {
        const ModelParams p =
            make_params(rate(rng), coupling(rng), hop(rng), rate(rng), nn(rng));
        const MeasureReport report = compute_measures(run(p), 3.0);
        CHECK(report.consistency_residual < 1e-6);
        if (report.nonmarkovianity == 0.0) {
            CHECK(std::abs(report.qsl_ratio_relation - 1.0) < 1e-12);
            CHECK(std::abs(report.qsl_ratio_direct - 1.0) < 1e-9);
        } else if (report.nonmarkovianity > kNonMarkovianOnset) {
            CHECK(report.qsl_ratio_relation < 1.0 - 1e-9);
        }
        CHECK(report.qsl_ratio_direct > 0.0);
        CHECK(report.qsl_ratio_direct <= 1.0 + 1e-9);
        CHECK(report.qsl_ratio_relation > 0.0);
        CHECK(report.qsl_ratio_relation <= 1.0);
    }
}

TEST_CASE("measure report on the strong baseline") {
    const MeasureReport report =
        compute_measures(run(make_params(0.2, 0, 0, 0, 0)), 3.0);
    CHECK(report.nonmarkovianity == doctest::Approx(kStrongBaselineNonmark).epsilon(1e-5));
    CHECK(report.qsl_ratio_direct == doctest::Approx(kStrongBaselineRatio).epsilon(1e-5));
    CHECK(report.qsl_ratio_relation == doctest::Approx(kStrongBaselineRatio).epsilon(1e-5));
    CHECK(report.survival_at_tau == doctest::Approx(kStrongBaselineNonmark).epsilon(1e-5));
    CHECK(report.consistency_residual < 1e-6);
    CHECK_FALSE(report.degenerate);
}

TEST_CASE("degenerate no-evolution run is flagged") {
    Generator gen = reduced_generator(make_params(5, 5, 1, 5, 4));
    gen.matrix(0, 1) = 0.0;
    gen.matrix(1, 0) = 0.0;
    Eigen::VectorXcd psi0 = Eigen::Vector3cd{1.0, 0.0, 0.0};
    const AmplitudeTrajectory traj = propagate(gen, TimeGrid{3.0, 1e-3}, psi0);
    const MeasureReport report = compute_measures(traj, 3.0);
    CHECK(report.degenerate);
    CHECK(report.qsl_ratio_direct == 1.0);
    CHECK(report.qsl_ratio_relation == 1.0);
}

TEST_CASE("tau must stay inside the trajectory") {
    const AmplitudeTrajectory traj = run(make_params(0.2, 0, 0, 0, 0), 2.0);
    CHECK_THROWS_AS(nonmarkovianity(traj, 2.5), std::invalid_argument);
    CHECK_THROWS_AS(compute_measures(traj, -1.0), std::invalid_argument);
    CHECK_NOTHROW(compute_measures(traj, 1.5));
}

TEST_CASE("measures at an off-grid tau") {
    const ModelParams p = make_params(0.2, 0, 0, 0, 0);
    const double tau = 2.0005;  // halfway between grid nodes
    const MeasureReport a = compute_measures(run(p, 3.0, 1e-3), tau);
    const MeasureReport b = compute_measures(run(p, 3.0, 2.5e-4), tau);
    CHECK(a.nonmarkovianity == doctest::Approx(b.nonmarkovianity).epsilon(1e-8));
    CHECK(a.survival_at_tau == doctest::Approx(b.survival_at_tau).epsilon(1e-8));
}
