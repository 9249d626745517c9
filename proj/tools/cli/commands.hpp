// commands.hpp — subcommand implementations shared by the binary and tests

#pragma once

#include <json.hpp>

#include "cli/run_config.hpp"
#include "cli/table.hpp"

namespace hierenv::cli {

struct OutputBundle {
    Table table;
    nlohmann::json summary;
    std::string svg;  // empty unless the command rendered one
};

OutputBundle cmd_dynamics(const RunConfig& cfg);
OutputBundle cmd_measure(const RunConfig& cfg);
OutputBundle cmd_critical(const RunConfig& cfg);
OutputBundle cmd_sweep(const RunConfig& cfg);

// figure in {2, 3, 4, 5}; presets the published parameter sets and reuses
// the sweep/scan machinery.
OutputBundle cmd_repro_fig(int figure, const RunConfig& cfg);

// Full command-line front end. Returns 0 on success, 1 on usage/config
// errors, 2 on numerical failure.
int run(int argc, const char* const* argv);

}  // namespace hierenv::cli
