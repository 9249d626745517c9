#include "cli/commands.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>

#include "cli/svg.hpp"
#include "hierenv/version.hpp"

namespace hierenv::cli {

namespace {

using nlohmann::json;

std::string sanitize_cell(std::string text) {
    for (char& c : text) {
        if (c == ',' || c == '\n' || c == '\r') c = ';';
    }
    return text;
}

std::string model_comment(const ModelParams& p) {
    std::ostringstream out;
    out << "model: omega0=" << format_double(p.omega0)
        << " gamma0=" << format_double(p.gamma0)
        << " kappa=" << format_double(p.kappa)
        << " omega=" << format_double(p.omega)
        << " gamma=" << format_double(p.gamma) << " n_cavities=" << p.n_cavities
        << " topology="
        << (p.topology == Topology::ReducedSymmetric ? "reduced" : "ring");
    return out.str();
}

json model_json(const ModelParams& p) {
    return json{{"omega0", p.omega0},
                {"gamma0", p.gamma0},
                {"kappa", p.kappa},
                {"omega", p.omega},
                {"gamma", p.gamma},
                {"n_cavities", p.n_cavities},
                {"topology",
                 p.topology == Topology::ReducedSymmetric ? "reduced" : "ring"}};
}

json base_summary(const std::string& command) {
    return json{{"tool", "hierenv"}, {"version", kVersion}, {"command", command}};
}

double nonmark_for(ModelParams params, double tau, double dt) {
    params.topology = Topology::ReducedSymmetric;
    return nonmarkovianity(simulate(params, TimeGrid{tau, dt}), tau);
}

OutputBundle sweep_bundle(const RunConfig& cfg, const std::string& command) {
    const SweepSpec spec = cfg.sweep_spec();
    const SweepResult result = sweep(spec);

    OutputBundle bundle;
    bundle.table.comments = {
        std::string("hierenv ") + kVersion,
        "command: " + command,
        model_comment(spec.base),
        "grid: tau=" + format_double(spec.tau) + " dt=" + format_double(spec.dt) +
            " omega=[" + format_double(spec.omega_start) + "," +
            format_double(spec.omega_stop) + "] step=" +
            format_double(spec.omega_step) + " n=[" + std::to_string(spec.n_min) +
            "," + std::to_string(spec.n_max) + "]",
    };
    bundle.table.header = {"omega", "n", "nonmarkovianity", "qsl_ratio",
                           "survival_at_tau", "status"};
    for (const SweepRow& row : result.rows) {
        bundle.table.rows.push_back(
            {format_double(row.omega), std::to_string(row.n),
             format_double(row.nonmarkovianity), format_double(row.qsl_ratio),
             format_double(row.survival_at_tau),
             row.ok ? "ok" : "failed: " + sanitize_cell(row.error)});
    }

    bundle.summary = base_summary(command);
    bundle.summary["model"] = model_json(spec.base);
    bundle.summary["grid"] = {{"tau", spec.tau},
                              {"dt", spec.dt},
                              {"omega_start", spec.omega_start},
                              {"omega_stop", spec.omega_stop},
                              {"omega_step", spec.omega_step},
                              {"n_min", spec.n_min},
                              {"n_max", spec.n_max}};
    bundle.summary["workers"] = spec.workers;
    std::size_t failed = 0;
    for (const auto& row : result.rows) {
        if (!row.ok) ++failed;
    }
    bundle.summary["rows"] = result.rows.size();
    bundle.summary["failed_rows"] = failed;

    if (!cfg.svg_path.empty()) {
        if (cfg.svg_metric != "qsl_ratio" && cfg.svg_metric != "nonmarkovianity") {
            throw ConfigError("svg metric must be qsl_ratio or nonmarkovianity");
        }
        const Table parsed = parse_csv(serialize_csv(bundle.table));
        bundle.svg = svg_heat_map(parsed, cfg.svg_metric,
                                  command + ": " + cfg.svg_metric +
                                      " over the omega-n plane");
    }
    return bundle;
}

}  // namespace

OutputBundle cmd_dynamics(const RunConfig& cfg) {
    const ModelParams params = cfg.model_params();
    const TimeGrid grid = cfg.time_grid();
    const AmplitudeTrajectory traj = simulate(params, grid);
    const std::vector<double> surv = survival_probability(traj);

    OutputBundle bundle;
    bundle.table.comments = {
        std::string("hierenv ") + kVersion,
        "command: dynamics",
        model_comment(params),
        "grid: t_end=" + format_double(grid.t_end) + " dt=" + format_double(grid.dt),
    };
    bundle.table.header = {"t",     "re_g",  "im_g",    "survival",
                           "re_c0", "im_c0", "re_csum", "im_csum"};
    for (std::size_t k = 0; k < traj.size(); ++k) {
        bundle.table.rows.push_back({format_double(traj.time_at(k)),
                                     format_double(traj.g[k].real()),
                                     format_double(traj.g[k].imag()),
                                     format_double(surv[k]),
                                     format_double(traj.c0[k].real()),
                                     format_double(traj.c0[k].imag()),
                                     format_double(traj.csum[k].real()),
                                     format_double(traj.csum[k].imag())});
    }

    bundle.summary = base_summary("dynamics");
    bundle.summary["model"] = model_json(params);
    bundle.summary["grid"] = {{"t_end", grid.t_end}, {"dt", grid.dt}};
    bundle.summary["rows"] = traj.size();
    bundle.summary["survival_at_t_end"] = surv.back();

    if (!cfg.svg_path.empty()) {
        const Table parsed = parse_csv(serialize_csv(bundle.table));
        bundle.svg = svg_line_plot(parsed, "t", "survival",
                                   "dynamics: survival probability");
    }
    return bundle;
}

OutputBundle cmd_measure(const RunConfig& cfg) {
    const ModelParams params = cfg.model_params();
    const TimeGrid grid = cfg.time_grid();
    const MeasureReport report =
        compute_measures(simulate(params, grid), cfg.tau);

    OutputBundle bundle;
    bundle.table.comments = {
        std::string("hierenv ") + kVersion,
        "command: measure",
        model_comment(params),
        "grid: tau=" + format_double(cfg.tau) + " dt=" + format_double(grid.dt),
    };
    bundle.table.header = {"nonmarkovianity", "qsl_ratio_direct",
                           "qsl_ratio_relation", "survival_at_tau",
                           "consistency_residual"};
    bundle.table.rows.push_back({format_double(report.nonmarkovianity),
                                 format_double(report.qsl_ratio_direct),
                                 format_double(report.qsl_ratio_relation),
                                 format_double(report.survival_at_tau),
                                 format_double(report.consistency_residual)});

    bundle.summary = base_summary("measure");
    bundle.summary["model"] = model_json(params);
    bundle.summary["grid"] = {{"tau", cfg.tau}, {"dt", grid.dt}};
    bundle.summary["results"] = {
        {"nonmarkovianity", report.nonmarkovianity},
        {"qsl_ratio_direct", report.qsl_ratio_direct},
        {"qsl_ratio_relation", report.qsl_ratio_relation},
        {"survival_at_tau", report.survival_at_tau},
        {"consistency_residual", report.consistency_residual},
        {"degenerate", report.degenerate}};
    return bundle;
}

OutputBundle cmd_critical(const RunConfig& cfg) {
    ModelParams base = cfg.model_params();
    base.topology = Topology::ReducedSymmetric;

    bool found = false;
    double value = 0.0;
    bool multiple = false;
    bool integer_result = false;

    if (cfg.scan == "omega") {
        const auto c =
            critical_omega(base, cfg.n_cavities, cfg.tau, cfg.scan_lo, cfg.scan_hi,
                           cfg.dt);
        if (c) {
            found = true;
            value = c->value;
            multiple = c->multiple_crossings;
        }
    } else if (cfg.scan == "kappa") {
        const auto c = critical_kappa(base, cfg.tau, cfg.scan_lo, cfg.scan_hi, cfg.dt);
        if (c) {
            found = true;
            value = c->value;
            multiple = c->multiple_crossings;
        }
    } else if (cfg.scan == "n") {
        const auto c = critical_n(base, cfg.omega, cfg.tau, cfg.scan_n_max, cfg.dt);
        integer_result = true;
        if (c) {
            found = true;
            value = static_cast<double>(*c);
        }
    } else {
        throw ConfigError("unknown scan variable '" + cfg.scan +
                          "' (use omega|n|kappa)");
    }

    OutputBundle bundle;
    bundle.table.comments = {
        std::string("hierenv ") + kVersion,
        "command: critical",
        model_comment(base),
        "scan: " + cfg.scan + " tau=" + format_double(cfg.tau) +
            " dt=" + format_double(cfg.dt),
    };
    bundle.table.header = {"scan", "found", "critical_value", "multiple_crossings"};
    std::string value_cell;
    if (found) {
        value_cell = integer_result
                         ? std::to_string(static_cast<int>(std::lround(value)))
                         : format_double(value);
    }
    bundle.table.rows.push_back(
        {cfg.scan, found ? "true" : "false", value_cell, multiple ? "true" : "false"});

    bundle.summary = base_summary("critical");
    bundle.summary["model"] = model_json(base);
    bundle.summary["scan"] = cfg.scan;
    bundle.summary["grid"] = {{"tau", cfg.tau}, {"dt", cfg.dt}};
    bundle.summary["result"] = {{"found", found},
                                {"multiple_crossings", multiple}};
    if (found) {
        if (integer_result) {
            bundle.summary["result"]["value"] = static_cast<int>(std::lround(value));
        } else {
            bundle.summary["result"]["value"] = value;
        }
    } else {
        bundle.summary["result"]["value"] = nullptr;
    }
    return bundle;
}

OutputBundle cmd_sweep(const RunConfig& cfg) { return sweep_bundle(cfg, "sweep"); }

OutputBundle cmd_repro_fig(int figure, const RunConfig& cfg) {
    RunConfig preset = cfg;
    switch (figure) {
        case 2: {
            // Weak regime kappa scans: (a) omega fixed, N varies; (b) N fixed,
            // omega varies.
            preset.gamma0 = 5.0;
            preset.gamma = 5.0;
            OutputBundle bundle;
            bundle.table.comments = {
                std::string("hierenv ") + kVersion,
                "command: repro-fig2",
                "weak regime kappa scans: gamma0=5 gamma=5 tau=" +
                    format_double(preset.tau) + " dt=" + format_double(preset.dt),
            };
            bundle.table.header = {"panel", "kappa", "omega", "n",
                                   "nonmarkovianity"};
            auto add_scan = [&](const std::string& panel, double omega, int n) {
                for (int i = 0; i <= 100; ++i) {
                    const double kappa = 0.1 * static_cast<double>(i);
                    ModelParams p = preset.model_params();
                    p.kappa = kappa;
                    p.omega = omega;
                    p.n_cavities = n;
                    bundle.table.rows.push_back(
                        {panel, format_double(kappa), format_double(omega),
                         std::to_string(n),
                         format_double(nonmark_for(p, preset.tau, preset.dt))});
                }
            };
            for (int n : {2, 3, 4, 6}) add_scan("a", 1.0, n);
            for (double omega : {0.0, 0.5, 1.0, 1.5}) add_scan("b", omega, 4);
            bundle.summary = base_summary("repro-fig2");
            bundle.summary["rows"] = bundle.table.rows.size();
            bundle.summary["grid"] = {{"tau", preset.tau}, {"dt", preset.dt}};
            return bundle;
        }
        case 3: {
            // Strong regime: nonmarkovianity against omega and N.
            preset.gamma0 = 0.2;
            preset.gamma = 0.2;
            preset.kappa = 0.2;
            ModelParams baseline = preset.model_params();
            baseline.kappa = 0.0;
            baseline.n_cavities = 0;
            baseline.omega = 0.0;
            const double baseline_nonmark =
                nonmark_for(baseline, preset.tau, preset.dt);

            OutputBundle bundle;
            bundle.table.comments = {
                std::string("hierenv ") + kVersion,
                "command: repro-fig3",
                "strong regime: gamma0=0.2 gamma=0.2 kappa=0.2 tau=" +
                    format_double(preset.tau) + " dt=" + format_double(preset.dt),
                "baseline_nonmarkovianity=" + format_double(baseline_nonmark),
            };
            bundle.table.header = {"panel", "omega", "n", "nonmarkovianity"};
            for (int n : {2, 4, 6, 8}) {
                for (int i = 0; i <= 50; ++i) {
                    const double omega = 0.1 * static_cast<double>(i);
                    ModelParams p = preset.model_params();
                    p.omega = omega;
                    p.n_cavities = n;
                    bundle.table.rows.push_back(
                        {"a", format_double(omega), std::to_string(n),
                         format_double(nonmark_for(p, preset.tau, preset.dt))});
                }
            }
            for (double omega : {0.5, 1.0, 1.5, 2.0}) {
                for (int n = 2; n <= 10; ++n) {
                    ModelParams p = preset.model_params();
                    p.omega = omega;
                    p.n_cavities = n;
                    bundle.table.rows.push_back(
                        {"b", format_double(omega), std::to_string(n),
                         format_double(nonmark_for(p, preset.tau, preset.dt))});
                }
            }
            bundle.summary = base_summary("repro-fig3");
            bundle.summary["rows"] = bundle.table.rows.size();
            bundle.summary["baseline_nonmarkovianity"] = baseline_nonmark;
            bundle.summary["grid"] = {{"tau", preset.tau}, {"dt", preset.dt}};
            return bundle;
        }
        case 4: {
            // Weak-regime omega-n phase diagram of the QSL ratio.
            preset.gamma0 = 5.0;
            preset.gamma = 5.0;
            preset.kappa = 5.0;
            preset.omega_start = 0.0;
            preset.omega_stop = 5.0;
            preset.omega_step = 0.05;
            preset.n_min = 2;
            preset.n_max = 8;
            preset.svg_metric = cfg.svg_metric;
            return sweep_bundle(preset, "repro-fig4");
        }
        case 5: {
            // Strong-regime omega-n tables of the QSL ratio.
            preset.gamma0 = 0.2;
            preset.gamma = 0.2;
            preset.kappa = 0.2;
            preset.omega_start = 0.0;
            preset.omega_stop = 5.0;
            preset.omega_step = 0.1;
            preset.n_min = 2;
            preset.n_max = 10;
            preset.svg_metric = cfg.svg_metric;
            return sweep_bundle(preset, "repro-fig5");
        }
        default:
            throw ConfigError("repro figure must be 2, 3, 4 or 5");
    }
}

namespace {

struct FileBinding {
    std::vector<CLI::Option*> options;
    std::function<void(const std::string&)> apply;
};

using BindingMap = std::map<std::string, FileBinding>;

void parse_into(const std::string& text, double& var) {
    std::size_t used = 0;
    var = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument("trailing characters");
}

void parse_into(const std::string& text, int& var) {
    std::size_t used = 0;
    var = std::stoi(text, &used);
    if (used != text.size()) throw std::invalid_argument("trailing characters");
}

void parse_into(const std::string& text, std::string& var) { var = text; }

template <typename T>
void bind_option(CLI::App* cmd, const std::string& flag, T& var,
                 const std::string& description, BindingMap* bindings,
                 const std::string& file_key = {}) {
    CLI::Option* opt = cmd->add_option(flag, var, description);
    if (file_key.empty()) return;
    FileBinding& binding = (*bindings)[file_key];
    binding.options.push_back(opt);
    if (!binding.apply) {
        binding.apply = [&var, file_key](const std::string& text) {
            try {
                parse_into(text, var);
            } catch (const std::exception&) {
                throw ConfigError("config value for " + file_key +
                                  " is not parseable: '" + text + "'");
            }
        };
    }
}

void add_model_options(CLI::App* cmd, RunConfig& cfg, BindingMap* bindings) {
    bind_option(cmd, "--omega0", cfg.omega0,
                "qubit-m0 coupling (the rate unit; default 1)", bindings,
                "model.omega0");
    bind_option(cmd, "--gamma0", cfg.gamma0, "m0 loss rate", bindings,
                "model.gamma0");
    bind_option(cmd, "--kappa", cfg.kappa, "m0 to second-layer coupling", bindings,
                "model.kappa");
    bind_option(cmd, "--omega", cfg.omega, "nearest-neighbor cavity coupling",
                bindings, "model.omega");
    bind_option(cmd, "--gamma", cfg.gamma, "second-layer loss rate", bindings,
                "model.gamma");
    bind_option(cmd, "--n-cavities", cfg.n_cavities, "second-layer cavity count",
                bindings, "model.n_cavities");
    bind_option(cmd, "--topology", cfg.topology, "reduced | ring", bindings,
                "model.topology");
}

void add_grid_options(CLI::App* cmd, RunConfig& cfg, BindingMap* bindings,
                      bool with_t_end = true) {
    bind_option(cmd, "--tau", cfg.tau, "evolution horizon for the measures",
                bindings, "grid.tau");
    bind_option(cmd, "--dt", cfg.dt, "output step (default 1e-3)", bindings,
                "grid.dt");
    if (with_t_end) {
        bind_option(cmd, "--t-end", cfg.t_end, "trajectory end (defaults to tau)",
                    bindings, "grid.t_end");
    }
}

void add_output_options(CLI::App* cmd, RunConfig& cfg, bool with_svg) {
    cmd->add_option("--out", cfg.out_path, "write the CSV table here");
    if (with_svg) cmd->add_option("--svg", cfg.svg_path, "write an SVG plot here");
    cmd->add_option("--config", cfg.config_path,
                    "key=value config file with [model]/[grid]/[sweep] sections");
}

void apply_config_file(const RunConfig& cfg, const BindingMap& bindings) {
    if (cfg.config_path.empty()) return;
    const auto values = parse_config_file(cfg.config_path);
    for (const auto& [key, value] : values) {
        const auto it = bindings.find(key);
        if (it == bindings.end()) {
            throw ConfigError("config key '" + key + "' is not recognized");
        }
        bool overridden = false;
        for (const CLI::Option* opt : it->second.options) {
            if (opt->count() > 0) overridden = true;
        }
        if (!overridden) it->second.apply(value);
    }
}

void emit(const OutputBundle& bundle, const RunConfig& cfg) {
    const std::string csv = serialize_csv(bundle.table);
    if (!cfg.out_path.empty()) {
        std::ofstream out(cfg.out_path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write '" + cfg.out_path + "'");
        out << csv;
    } else {
        std::cout << csv;
    }
    if (!cfg.svg_path.empty()) {
        if (bundle.svg.empty()) {
            throw ConfigError("this command does not produce SVG output");
        }
        std::ofstream out(cfg.svg_path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write '" + cfg.svg_path + "'");
        out << bundle.svg;
    }
    json summary = bundle.summary;
    summary["outputs"] = {
        {"csv", cfg.out_path.empty() ? json(nullptr) : json(cfg.out_path)},
        {"svg", cfg.svg_path.empty() ? json(nullptr) : json(cfg.svg_path)}};
    std::cout << summary.dump() << "\n";
}

}  // namespace

int run(int argc, const char* const* argv) {
    CLI::App app{"hierenv: single-excitation dynamics of a qubit in a lossy "
                 "cavity coupled to a ring of lossy cavities"};
    app.set_version_flag("--version", std::string("hierenv ") + kVersion);
    app.require_subcommand(1);

    RunConfig cfg;
    BindingMap bindings;
    std::function<OutputBundle()> action;

    CLI::App* dynamics = app.add_subcommand(
        "dynamics", "propagate the amplitudes and emit the trajectory table");
    add_model_options(dynamics, cfg, &bindings);
    add_grid_options(dynamics, cfg, &bindings);
    add_output_options(dynamics, cfg, true);
    dynamics->callback([&] { action = [&] { return cmd_dynamics(cfg); }; });

    CLI::App* measure = app.add_subcommand(
        "measure", "non-Markovianity and QSL ratios over [0, tau]");
    add_model_options(measure, cfg, &bindings);
    add_grid_options(measure, cfg, &bindings);
    add_output_options(measure, cfg, false);
    measure->callback([&] { action = [&] { return cmd_measure(cfg); }; });

    CLI::App* critical = app.add_subcommand(
        "critical", "locate a Markovian/non-Markovian crossover");
    add_model_options(critical, cfg, &bindings);
    add_grid_options(critical, cfg, &bindings, false);
    critical->add_option("--scan", cfg.scan, "scanned variable: omega | n | kappa");
    critical->add_option("--lo", cfg.scan_lo, "bracket lower edge");
    critical->add_option("--hi", cfg.scan_hi, "bracket upper edge");
    critical->add_option("--n-max", cfg.scan_n_max, "largest N for --scan n");
    add_output_options(critical, cfg, false);
    critical->callback([&] { action = [&] { return cmd_critical(cfg); }; });

    CLI::App* sweep_cmd = app.add_subcommand(
        "sweep", "tabulate the measures over an omega-n grid");
    add_model_options(sweep_cmd, cfg, &bindings);
    add_grid_options(sweep_cmd, cfg, &bindings, false);
    bind_option(sweep_cmd, "--omega-start", cfg.omega_start, "grid start", &bindings,
                "sweep.omega_start");
    bind_option(sweep_cmd, "--omega-stop", cfg.omega_stop, "grid stop", &bindings,
                "sweep.omega_stop");
    bind_option(sweep_cmd, "--omega-step", cfg.omega_step, "grid step", &bindings,
                "sweep.omega_step");
    bind_option(sweep_cmd, "--n-min", cfg.n_min, "smallest N", &bindings,
                "sweep.n_min");
    bind_option(sweep_cmd, "--n-max", cfg.n_max, "largest N", &bindings,
                "sweep.n_max");
    bind_option(sweep_cmd, "--workers", cfg.workers, "worker threads", &bindings,
                "sweep.workers");
    sweep_cmd->add_option("--svg-metric", cfg.svg_metric,
                          "heat-map metric: qsl_ratio | nonmarkovianity");
    add_output_options(sweep_cmd, cfg, true);
    sweep_cmd->callback([&] { action = [&] { return cmd_sweep(cfg); }; });

    for (int figure : {2, 3, 4, 5}) {
        CLI::App* repro = app.add_subcommand(
            "repro-fig" + std::to_string(figure),
            "reproduce the published figure-" + std::to_string(figure) + " data");
        add_grid_options(repro, cfg, &bindings, false);
        if (figure >= 4) {
            bind_option(repro, "--workers", cfg.workers, "worker threads", &bindings,
                        "sweep.workers");
            repro->add_option("--svg-metric", cfg.svg_metric,
                              "heat-map metric: qsl_ratio | nonmarkovianity");
        }
        add_output_options(repro, cfg, figure >= 4);
        repro->callback(
            [&, figure] { action = [&, figure] { return cmd_repro_fig(figure, cfg); }; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        apply_config_file(cfg, bindings);
        emit(action(), cfg);
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace hierenv::cli
