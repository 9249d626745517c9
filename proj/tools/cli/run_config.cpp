#include "cli/run_config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace hierenv::cli {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

}  // namespace

ModelParams RunConfig::model_params() const {
    ModelParams params;
    params.omega0 = omega0;
    params.gamma0 = gamma0;
    params.kappa = kappa;
    params.omega = omega;
    params.gamma = gamma;
    params.n_cavities = n_cavities;
    if (topology == "reduced") {
        params.topology = Topology::ReducedSymmetric;
    } else if (topology == "ring") {
        params.topology = Topology::RingExplicit;
    } else {
        throw ConfigError("unknown topology '" + topology + "' (use reduced|ring)");
    }
    return params;
}

TimeGrid RunConfig::time_grid() const {
    const double horizon = t_end < 0.0 ? tau : t_end;
    if (horizon < tau) {
        throw ConfigError("t_end is shorter than tau");
    }
    return TimeGrid{horizon, dt};
}

SweepSpec RunConfig::sweep_spec() const {
    SweepSpec spec;
    spec.base = model_params();
    spec.base.topology = Topology::ReducedSymmetric;
    spec.omega_start = omega_start;
    spec.omega_stop = omega_stop;
    spec.omega_step = omega_step;
    spec.n_min = n_min;
    spec.n_max = n_max;
    spec.tau = tau;
    spec.dt = dt;
    spec.workers = workers;
    return spec;
}

std::map<std::string, std::string> parse_config_text(const std::string& text) {
    static const std::string kSections[] = {"model", "grid", "sweep"};
    std::map<std::string, std::string> values;
    std::istringstream stream(text);
    std::string line;
    std::string section;
    int line_no = 0;
    while (std::getline(stream, line)) {
        ++line_no;
        const auto comment = line.find_first_of("#;");
        if (comment != std::string::npos) line.erase(comment);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw ConfigError("config line " + std::to_string(line_no) +
                                  ": unterminated section header");
            }
            section = trim(line.substr(1, line.size() - 2));
            if (std::find(std::begin(kSections), std::end(kSections), section) ==
                std::end(kSections)) {
                throw ConfigError("config line " + std::to_string(line_no) +
                                  ": unknown section [" + section + "]");
            }
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config line " + std::to_string(line_no) +
                              ": expected key=value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) {
            throw ConfigError("config line " + std::to_string(line_no) +
                              ": empty key or value");
        }
        if (section.empty()) {
            throw ConfigError("config line " + std::to_string(line_no) +
                              ": key outside any section");
        }
        values[section + "." + key] = value;
    }
    return values;
}

std::map<std::string, std::string> parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config_text(buffer.str());
}

}  // namespace hierenv::cli
