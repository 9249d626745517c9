// run_config.hpp — merged flag/file configuration for the CLI

#pragma once

#include <map>
#include <stdexcept>
#include <string>

#include "hierenv/analysis.hpp"
#include "hierenv/model.hpp"
#include "hierenv/propagation.hpp"

namespace hierenv::cli {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// One flat record behind every subcommand; flags override config-file
// values, which override the defaults below. All rates in units of omega0.
struct RunConfig {
    // [model]
    double omega0 = 1.0;
    double gamma0 = 0.0;
    double kappa = 0.0;
    double omega = 0.0;
    double gamma = 0.0;
    int n_cavities = 0;
    std::string topology = "reduced";  // reduced | ring

    // [grid]
    double tau = 3.0;
    double dt = 1e-3;
    double t_end = -1.0;  // negative: follow tau

    // [sweep]
    double omega_start = 0.0;
    double omega_stop = 5.0;
    double omega_step = 0.05;
    int n_min = 2;
    int n_max = 8;
    int workers = 1;

    // critical-point search
    std::string scan = "omega";  // omega | n | kappa
    double scan_lo = 0.0;
    double scan_hi = 5.0;
    int scan_n_max = 12;

    // output
    std::string out_path;
    std::string svg_path;
    std::string config_path;
    std::string svg_metric = "qsl_ratio";  // qsl_ratio | nonmarkovianity

    ModelParams model_params() const;  // throws ConfigError on bad topology
    TimeGrid time_grid() const;        // horizon defaults to tau
    SweepSpec sweep_spec() const;
};

// Plain-text key=value file with [model], [grid] and [sweep] sections;
// returns section-qualified keys ("model.gamma0"). Throws ConfigError on
// malformed lines or unknown sections.
std::map<std::string, std::string> parse_config_file(const std::string& path);
std::map<std::string, std::string> parse_config_text(const std::string& text);

}  // namespace hierenv::cli
