// analysis.cpp — crossover bisection and the parallel sweep

#include "hierenv/analysis.hpp"

#include <atomic>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <thread>

#include "hierenv/propagation.hpp"

namespace hierenv {

namespace {

constexpr double kScanStep = 0.05;
constexpr double kBisectWidth = 1e-3;

double nonmark_at(const ModelParams& base, double omega, int n, double tau,
                  double dt) {
    ModelParams params = base;
    params.topology = Topology::ReducedSymmetric;
    params.omega = omega;
    params.n_cavities = n;
    const TimeGrid grid{tau, dt};
    return nonmarkovianity(simulate(params, grid), tau);
}

// Scan-then-bisect on a boolean classifier over [lo, hi]. Returns the first
// boundary and whether later crossings exist.
std::optional<CriticalPoint> first_crossing(
    const std::function<double(double)>& measure, double lo, double hi) {
    if (!(lo < hi)) throw std::invalid_argument("bracket must satisfy lo < hi");

    std::vector<double> xs;
    for (double x = lo; x < hi + 1e-12; x += kScanStep) xs.push_back(std::min(x, hi));
    if (xs.back() < hi - 1e-12) xs.push_back(hi);

    auto nonmark_class = [&](double x) { return measure(x) > kNonMarkovianOnset; };

    std::optional<std::size_t> first;
    int crossings = 0;
    bool prev = nonmark_class(xs[0]);
    std::vector<bool> classes{prev};
    for (std::size_t i = 1; i < xs.size(); ++i) {
        const bool cur = nonmark_class(xs[i]);
        classes.push_back(cur);
        if (cur != prev) {
            ++crossings;
            if (!first) first = i - 1;
        }
        prev = cur;
    }
    if (!first) return std::nullopt;

    double a = xs[*first];
    double b = xs[*first + 1];
    bool class_a = classes[*first];
    while (b - a > kBisectWidth) {
        const double mid = 0.5 * (a + b);
        if (nonmark_class(mid) == class_a) {
            a = mid;
        } else {
            b = mid;
        }
    }
    return CriticalPoint{0.5 * (a + b), crossings > 1};
}

}  // namespace

void SweepSpec::validate() const {
    base.validate();
    if (!(omega_step > 0.0)) {
        throw std::invalid_argument("SweepSpec: omega_step must be positive");
    }
    if (omega_stop < omega_start) {
        throw std::invalid_argument("SweepSpec: omega_stop must be >= omega_start");
    }
    if (n_min < 0 || n_max < n_min) {
        throw std::invalid_argument("SweepSpec: need 0 <= n_min <= n_max");
    }
    if (!(tau > 0.0)) throw std::invalid_argument("SweepSpec: tau must be positive");
    if (!(dt > 0.0)) throw std::invalid_argument("SweepSpec: dt must be positive");
    if (workers < 1) throw std::invalid_argument("SweepSpec: workers must be >= 1");
}

std::vector<double> SweepSpec::omega_values() const {
    const auto count = static_cast<std::size_t>(
        std::floor((omega_stop - omega_start) / omega_step + 1e-9));
    std::vector<double> values(count + 1);
    for (std::size_t i = 0; i <= count; ++i) {
        values[i] = omega_start + static_cast<double>(i) * omega_step;
    }
    return values;
}

std::vector<int> SweepSpec::n_values() const {
    std::vector<int> values;
    for (int n = n_min; n <= n_max; ++n) values.push_back(n);
    return values;
}

std::optional<CriticalPoint> critical_omega(const ModelParams& base, int n,
                                            double tau, double lo, double hi,
                                            double dt) {
    return first_crossing(
        [&](double omega) { return nonmark_at(base, omega, n, tau, dt); }, lo, hi);
}

std::optional<int> critical_n(const ModelParams& base, double omega, double tau,
                              int n_max, double dt) {
    if (n_max < 2) throw std::invalid_argument("critical_n: n_max must be >= 2");
    for (int n = 2; n <= n_max; ++n) {
        if (nonmark_at(base, omega, n, tau, dt) > kNonMarkovianOnset) return n;
    }
    return std::nullopt;
}

std::optional<CriticalPoint> critical_kappa(const ModelParams& base, double tau,
                                            double lo, double hi, double dt) {
    return first_crossing(
        [&](double kappa) {
            ModelParams params = base;
            params.kappa = kappa;
            return nonmark_at(params, params.omega, params.n_cavities, tau, dt);
        },
        lo, hi);
}

SweepResult sweep(const SweepSpec& spec) {
    spec.validate();
    const std::vector<double> omegas = spec.omega_values();
    const std::vector<int> ns = spec.n_values();

    SweepResult result;
    result.spec = spec;
    result.rows.resize(omegas.size() * ns.size());

    // (n, omega) lexicographic point list; each point is independent, so a
    // work-stealing index keeps results deterministic for any worker count.
    auto eval_point = [&](std::size_t idx) {
        SweepRow row;
        row.n = ns[idx / omegas.size()];
        row.omega = omegas[idx % omegas.size()];
        try {
            ModelParams params = spec.base;
            params.topology = Topology::ReducedSymmetric;
            params.omega = row.omega;
            params.n_cavities = row.n;
            const TimeGrid grid{spec.tau, spec.dt};
            const MeasureReport report =
                compute_measures(simulate(params, grid), spec.tau);
            row.nonmarkovianity = report.nonmarkovianity;
            row.qsl_ratio = report.qsl_ratio_relation;
            row.survival_at_tau = report.survival_at_tau;
        } catch (const std::exception& e) {
            row.ok = false;
            row.error = e.what();
        }
        result.rows[idx] = std::move(row);
    };

    const std::size_t total = result.rows.size();
    const int workers = std::min<int>(spec.workers, static_cast<int>(total));
    if (workers <= 1) {
        for (std::size_t i = 0; i < total; ++i) eval_point(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < total;
                     i = next.fetch_add(1)) {
                    eval_point(i);
                }
            });
        }
        for (std::thread& t : pool) t.join();
    }
    return result;
}

}  // namespace hierenv
