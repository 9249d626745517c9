#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "cli/commands.hpp"
#include "cli/run_config.hpp"
#include "cli/svg.hpp"
#include "cli/table.hpp"

using namespace hierenv;
using namespace hierenv::cli;

namespace {

namespace fs = std::filesystem;

fs::path temp_dir() {
    const fs::path dir = fs::temp_directory_path() / "hierenv_cli_tests";
    fs::create_directories(dir);
    return dir;
}

int run_cli(const std::vector<std::string>& args) {
    std::vector<const char*> argv{"hierenv"};
    for (const auto& a : args) argv.push_back(a.c_str());
    return hierenv::cli::run(static_cast<int>(argv.size()), argv.data());
}

// Minimal well-formedness check: every opened tag is closed in order.
bool xml_balanced(const std::string& text) {
    std::vector<std::string> stack;
    std::size_t pos = 0;
    while ((pos = text.find('<', pos)) != std::string::npos) {
        const std::size_t end = text.find('>', pos);
        if (end == std::string::npos) return false;
        std::string tag = text.substr(pos + 1, end - pos - 1);
        pos = end + 1;
        if (tag.empty()) return false;
        if (tag.front() == '?' || tag.front() == '!') continue;
        const bool closing = tag.front() == '/';
        const bool self_closing = tag.back() == '/';
        std::string name = tag.substr(closing ? 1 : 0);
        const std::size_t space = name.find_first_of(" \t\n");
        if (space != std::string::npos) name.resize(space);
        if (closing) {
            if (stack.empty() || stack.back() != name) return false;
            stack.pop_back();
        } else if (!self_closing) {
            stack.push_back(name);
        }
    }
    return stack.empty();
}

}  // namespace

TEST_CASE("shortest round-trip double formatting") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> dist(-10.0, 10.0);
    for (int i = 0; i < 1000; ++i) {
        const double v = dist(rng);
        CHECK(cell_as_double(format_double(v)) == v);
    }
    CHECK(format_double(0.714) == "0.714");
    CHECK(format_double(1.0) == "1");
    CHECK(cell_as_double(format_double(1e-300)) == 1e-300);
}

TEST_CASE("csv round trip") {
    Table table;
    table.comments = {"hierenv test", "second comment"};
    table.header = {"a", "b", "c"};
    table.rows = {{"1", "2.5", "ok"}, {"-3", "0.1", "failed: x; y"}};
    const std::string text = serialize_csv(table);
    CHECK(parse_csv(text) == table);
    CHECK(serialize_csv(parse_csv(text)) == text);
    CHECK(text.find("\r") == std::string::npos);

    CHECK_THROWS(parse_csv("a,b\n1,2,3\n"));
    CHECK_THROWS(parse_csv(""));
}

TEST_CASE("config file parsing") {
    const std::string text = R"(# demo configuration
[model]
gamma0 = 5
kappa = 5       ; inline comment
n_cavities = 6

[grid]
tau = 3
dt = 0.001

[sweep]
omega_start = 0
workers = 4
)";
    const auto values = parse_config_text(text);
    CHECK(values.at("model.gamma0") == "5");
    CHECK(values.at("model.kappa") == "5");
    CHECK(values.at("model.n_cavities") == "6");
    CHECK(values.at("grid.tau") == "3");
    CHECK(values.at("sweep.workers") == "4");

    CHECK_THROWS_AS(parse_config_text("[model\ngamma0=1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("[orbit]\nx=1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("gamma0=1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("[model]\ngamma0\n"), ConfigError);
}

TEST_CASE("run config assembly") {
    RunConfig cfg;
    cfg.gamma0 = 5.0;
    cfg.topology = "ring";
    cfg.n_cavities = 4;
    const ModelParams params = cfg.model_params();
    CHECK(params.topology == Topology::RingExplicit);
    CHECK(params.gamma0 == 5.0);

    cfg.topology = "torus";
    CHECK_THROWS_AS(cfg.model_params(), ConfigError);

    cfg = RunConfig{};
    cfg.tau = 3.0;
    CHECK(cfg.time_grid().t_end == 3.0);
    cfg.t_end = 5.0;
    CHECK(cfg.time_grid().t_end == 5.0);
    cfg.t_end = 2.0;
    CHECK_THROWS_AS(cfg.time_grid(), ConfigError);
}

TEST_CASE("dynamics command") {
    RunConfig cfg;
    cfg.gamma0 = 0.2;
    cfg.tau = 3.0;

    const OutputBundle bundle = cmd_dynamics(cfg);
    CHECK(bundle.table.header ==
          std::vector<std::string>{"t", "re_g", "im_g", "survival", "re_c0", "im_c0",
                                   "re_csum", "im_csum"});
    CHECK(bundle.table.rows.size() == 3001);
    const auto& last = bundle.table.rows.back();
    CHECK(cell_as_double(last[0]) == doctest::Approx(3.0));
    CHECK(cell_as_double(last[3]) == doctest::Approx(0.714687).epsilon(1e-4));
    CHECK(bundle.summary.at("survival_at_t_end").get<double>() ==
          doctest::Approx(0.714687).epsilon(1e-4));

    SUBCASE("identical configs give identical bytes") {
        const OutputBundle again = cmd_dynamics(cfg);
        CHECK(serialize_csv(bundle.table) == serialize_csv(again.table));
    }
    SUBCASE("invalid grid is a usage error") {
        RunConfig bad = cfg;
        bad.tau = 0.0;
        CHECK_THROWS_AS(cmd_dynamics(bad), std::invalid_argument);
    }
    SUBCASE("svg plot is well-formed and carries the table") {
        RunConfig with_svg = cfg;
        with_svg.svg_path = "unused.svg";  // triggers rendering
        const OutputBundle plotted = cmd_dynamics(with_svg);
        CHECK(xml_balanced(plotted.svg));
        CHECK(plotted.svg.find("<polyline") != std::string::npos);
        CHECK(plotted.svg.find("survival") != std::string::npos);
    }
}

TEST_CASE("measure command") {
    RunConfig cfg;
    cfg.gamma0 = 0.2;
    const OutputBundle strong = cmd_measure(cfg);
    REQUIRE(strong.table.rows.size() == 1);
    CHECK(cell_as_double(strong.table.rows[0][0]) ==
          doctest::Approx(0.714).epsilon(0.015));
    CHECK(cell_as_double(strong.table.rows[0][1]) ==
          doctest::Approx(0.166).epsilon(0.03));
    CHECK(cell_as_double(strong.table.rows[0][4]) < 1e-6);

    cfg.gamma0 = 5.0;
    const OutputBundle weak = cmd_measure(cfg);
    CHECK(cell_as_double(weak.table.rows[0][0]) == 0.0);
    CHECK(cell_as_double(weak.table.rows[0][1]) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(cell_as_double(weak.table.rows[0][2]) == 1.0);

    SUBCASE("consistency on random configs") {
        std::mt19937 rng(3);
        std::uniform_real_distribution<double> rate(0.0, 6.0);
        std::uniform_int_distribution<int> nn(0, 8);
        for (int i = 0; i < 20; ++i) {
            RunConfig random;
            random.gamma0 = rate(rng);
            random.kappa = rate(rng);
            random.omega = rate(rng);
            random.gamma = rate(rng);
            random.n_cavities = nn(rng);
            const OutputBundle bundle = cmd_measure(random);
            CHECK(cell_as_double(bundle.table.rows[0][4]) < 1e-6);
        }
    }
}

TEST_CASE("critical command") {
    RunConfig cfg;
    cfg.gamma0 = 5.0;
    cfg.kappa = 5.0;
    cfg.gamma = 5.0;

    SUBCASE("omega scan at N = 6") {
        cfg.scan = "omega";
        cfg.n_cavities = 6;
        const OutputBundle bundle = cmd_critical(cfg);
        CHECK(bundle.table.rows[0][1] == "true");
        CHECK(cell_as_double(bundle.table.rows[0][2]) ==
              doctest::Approx(2.39).epsilon(0.025));
    }
    SUBCASE("n scan at omega = 1.5") {
        cfg.scan = "n";
        cfg.omega = 1.5;
        const OutputBundle bundle = cmd_critical(cfg);
        CHECK(bundle.table.rows[0][1] == "true");
        CHECK(bundle.table.rows[0][2] == "5");
        CHECK(bundle.summary.at("result").at("value").get<int>() == 5);
    }
    SUBCASE("omega scan at N = 2 reports none") {
        cfg.scan = "omega";
        cfg.n_cavities = 2;
        const OutputBundle bundle = cmd_critical(cfg);
        CHECK(bundle.table.rows[0][1] == "false");
        CHECK(bundle.table.rows[0][2].empty());
        CHECK(bundle.summary.at("result").at("value").is_null());
    }
    SUBCASE("unknown scan variable") {
        cfg.scan = "tau";
        CHECK_THROWS_AS(cmd_critical(cfg), ConfigError);
    }
}

TEST_CASE("sweep command") {
    RunConfig cfg;
    cfg.gamma0 = 5.0;
    cfg.kappa = 5.0;
    cfg.gamma = 5.0;
    cfg.omega_start = 0.0;
    cfg.omega_stop = 2.0;
    cfg.omega_step = 0.5;
    cfg.n_min = 2;
    cfg.n_max = 5;

    const OutputBundle bundle = cmd_sweep(cfg);
    CHECK(bundle.table.header ==
          std::vector<std::string>{"omega", "n", "nonmarkovianity", "qsl_ratio",
                                   "survival_at_tau", "status"});
    CHECK(bundle.table.rows.size() == 20);
    for (const auto& row : bundle.table.rows) CHECK(row[5] == "ok");

    SUBCASE("bytes do not depend on the worker count") {
        RunConfig parallel = cfg;
        parallel.workers = 8;
        CHECK(serialize_csv(cmd_sweep(parallel).table) ==
              serialize_csv(bundle.table));
    }
    SUBCASE("empty omega range is a usage error") {
        RunConfig bad = cfg;
        bad.omega_stop = -1.0;
        CHECK_THROWS_AS(cmd_sweep(bad), std::invalid_argument);
    }
    SUBCASE("heat map is well-formed") {
        RunConfig with_svg = cfg;
        with_svg.svg_path = "unused.svg";
        const OutputBundle plotted = cmd_sweep(with_svg);
        CHECK(xml_balanced(plotted.svg));
        CHECK(plotted.svg.find("<rect") != std::string::npos);
        CHECK(plotted.svg.find("qsl_ratio") != std::string::npos);
        RunConfig bad = with_svg;
        bad.svg_metric = "entropy";
        CHECK_THROWS_AS(cmd_sweep(bad), ConfigError);
    }
}

TEST_CASE("fig4 boundary passes through the published critical points") {
    RunConfig cfg;
    cfg.workers = 4;
    const OutputBundle bundle = cmd_repro_fig(4, cfg);
    const Table table = parse_csv(serialize_csv(bundle.table));

    auto boundary_for = [&](int n) {
        double prev_omega = 0.0;
        bool prev_speedup = false;
        bool first = true;
        for (const auto& row : table.rows) {
            if (std::stoi(row[1]) != n) continue;
            const double omega = cell_as_double(row[0]);
            const bool speedup = cell_as_double(row[3]) < 1.0 - 1e-9;
            if (!first && speedup != prev_speedup) {
                return 0.5 * (prev_omega + omega);
            }
            prev_omega = omega;
            prev_speedup = speedup;
            first = false;
        }
        return -1.0;
    };
    CHECK(std::abs(boundary_for(6) - 2.39) <= 0.05 + 1e-9);
    CHECK(std::abs(boundary_for(8) - 3.25) <= 0.05 + 1e-9);
    CHECK(boundary_for(2) == -1.0);  // no speedup anywhere at N = 2
}

TEST_CASE("repro figure presets") {
    RunConfig cfg;
    cfg.dt = 5e-3;  // keep the test quick; presets only pin parameters

    SUBCASE("fig2 kappa scans") {
        const OutputBundle bundle = cmd_repro_fig(2, cfg);
        CHECK(bundle.table.header ==
              std::vector<std::string>{"panel", "kappa", "omega", "n",
                                       "nonmarkovianity"});
        CHECK(bundle.table.rows.size() == 8 * 101);
    }
    SUBCASE("fig3 strong-regime table records the baseline") {
        const OutputBundle bundle = cmd_repro_fig(3, cfg);
        bool found = false;
        for (const auto& comment : bundle.table.comments) {
            if (comment.starts_with("baseline_nonmarkovianity=")) {
                found = true;
                CHECK(cell_as_double(comment.substr(comment.find('=') + 1)) ==
                      doctest::Approx(0.714687).epsilon(1e-3));
            }
        }
        CHECK(found);
    }
    SUBCASE("unknown figure") {
        CHECK_THROWS_AS(cmd_repro_fig(7, cfg), ConfigError);
    }
}

TEST_CASE("cli entry point") {
    const fs::path dir = temp_dir();

    SUBCASE("config file merges under flags") {
        const fs::path config = dir / "run.conf";
        {
            std::ofstream out(config);
            out << "[model]\ngamma0 = 0.2\nkappa = 0.7\n[grid]\ntau = 2\n";
        }
        const fs::path csv = dir / "merge.csv";
        // --kappa on the command line must beat the file's 0.7.
        CHECK(run_cli({"measure", "--config", config.string(), "--kappa", "0",
                       "--out", csv.string()}) == 0);
        std::ifstream in(csv);
        std::stringstream buffer;
        buffer << in.rdbuf();
        const Table table = parse_csv(buffer.str());
        bool saw_model = false;
        for (const auto& comment : table.comments) {
            if (comment.find("gamma0=0.2") != std::string::npos) {
                saw_model = true;
                CHECK(comment.find("kappa=0 ") != std::string::npos);
            }
        }
        CHECK(saw_model);
    }
    SUBCASE("bad config key fails with usage status") {
        const fs::path config = dir / "bad.conf";
        {
            std::ofstream out(config);
            out << "[model]\ngamma9 = 1\n";
        }
        CHECK(run_cli({"measure", "--config", config.string()}) == 1);
    }
    SUBCASE("t_end = 0 is rejected") {
        CHECK(run_cli({"dynamics", "--gamma0", "0.2", "--t-end", "0"}) == 1);
    }
    SUBCASE("missing subcommand is a usage error") {
        CHECK(run_cli({}) != 0);
    }
    SUBCASE("svg on a non-plotting command is a usage error") {
        // measure has no --svg flag at all
        CHECK(run_cli({"measure", "--svg", (dir / "x.svg").string()}) != 0);
    }
    SUBCASE("dynamics writes csv and svg files") {
        const fs::path csv = dir / "dyn.csv";
        const fs::path svg = dir / "dyn.svg";
        CHECK(run_cli({"dynamics", "--gamma0", "0.2", "--tau", "3", "--out",
                       csv.string(), "--svg", svg.string()}) == 0);
        CHECK(fs::exists(csv));
        CHECK(fs::exists(svg));
        std::ifstream in(svg);
        std::stringstream buffer;
        buffer << in.rdbuf();
        CHECK(xml_balanced(buffer.str()));
    }
}
