// ============================================================================
//  revdiff_main.cpp
//
//  Experiment runner. Each command reproduces one study as CSV datasets plus
//  a machine-readable report.json; assertions encode the claims the study
//  makes, and the exit status says whether they all held:
//      0  every assertion passed
//      1  an assertion failed (the first failing metric is named on stderr)
//      2  bad configuration or a run that could not be carried out
// ============================================================================

#include "CLI11.hpp"

#include "revdiff/config.hpp"
#include "revdiff/experiments.hpp"

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

namespace {

const char* command_blurb(const std::string& name) {
    if (name == "evolve") {
        return "unitarity and energy conservation of the complex diffusion";
    }
    if (name == "reversal") {
        return "conjugate-evolve-conjugate-evolve round trip and velocity flip";
    }
    if (name == "heat-contrast") {
        return "the same reversal protocol fails through the heat equation";
    }
    if (name == "hydro") {
        return "velocity decomposition, kinetic split, continuity, u ~ 1/m";
    }
    if (name == "walkers") {
        return "ensemble equivariance, time-reversed walks, roughness ~ 1/m";
    }
    if (name == "born") {
        return "window-limit interval probabilities against direct quadrature";
    }
    if (name == "eigen-born") {
        return "mode weights |c_n|^2, cross terms, spectral completeness";
    }
    if (name == "double-slit") {
        return "four-term screen decomposition, fringes, dark-cell starvation";
    }
    if (name == "eventcalc") {
        return "entangled-pair measures, decompositions, hyper-space bookkeeping";
    }
    if (name == "spin") {
        return "two-level star pairing: orthonormality, Born weights, exclusivity";
    }
    return "every command above, metrics namespaced per experiment";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"revdiff: a numerical laboratory for reversible-diffusion "
                 "quantum mechanics"};
    app.fallthrough();

    std::string config_path;
    std::vector<std::string> overrides;
    std::string seed_text;
    std::string out_text;
    std::string threads_text;
    std::string c1_text;
    std::string c2_text;
    std::string z_text;

    app.add_option("--config", config_path, "config file with 'key = value' lines");
    app.add_option("--set", overrides, "override one config key, e.g. --set grid.n=4096")
        ->type_size(1);
    app.add_option("--seed", seed_text, "shorthand for --set seed=N");
    app.add_option("--out", out_text, "shorthand for --set out_dir=DIR");
    app.add_option("--threads", threads_text,
                   "shorthand for --set threads=N (0 = auto; never affects results)");
    app.add_option("--c1", c1_text, "shorthand for --set spin.c1=VALUE");
    app.add_option("--c2", c2_text, "shorthand for --set spin.c2=VALUE");
    app.add_option("--z", z_text, "shorthand for --set eventcalc.z=VALUE");
    app.footer("Config keys and their defaults (also accepted by --set):\n" +
               revdiff::config_reference() +
               "\nThe environment variable REVDIFF_OUT overrides out_dir.\n"
               "born/eigen-born default to the [0, 1] well box with 2049 nodes and\n"
               "double-slit to [-40, 40] with 4096 nodes unless grid.* is set.");

    for (const std::string& name : revdiff::experiment_names()) {
        app.add_subcommand(name, command_blurb(name));
    }
    app.require_subcommand(0, 1);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2; // any command-line problem is a config error
    }

    std::string command;
    for (const std::string& name : revdiff::experiment_names()) {
        if (app.got_subcommand(name)) {
            command = name;
        }
    }
    if (command.empty()) {
        std::cerr << "no command given; expected one of:";
        for (const std::string& name : revdiff::experiment_names()) {
            std::cerr << ' ' << name;
        }
        std::cerr << "\n(see --help)\n";
        return 2;
    }

    revdiff::SimConfig cfg;
    try {
        if (!config_path.empty()) {
            cfg = revdiff::load_config(config_path);
        }
        for (const std::string& entry : overrides) {
            const std::size_t eq = entry.find('=');
            if (eq == std::string::npos) {
                throw revdiff::ConfigError("--set expects key=value, got '" + entry + "'");
            }
            revdiff::apply_key(cfg, entry.substr(0, eq), entry.substr(eq + 1));
        }
        if (const char* env_out = std::getenv("REVDIFF_OUT"); env_out != nullptr && *env_out) {
            revdiff::apply_key(cfg, "out_dir", env_out);
        }
        if (!seed_text.empty()) {
            revdiff::apply_key(cfg, "seed", seed_text);
        }
        if (!out_text.empty()) {
            revdiff::apply_key(cfg, "out_dir", out_text);
        }
        if (!threads_text.empty()) {
            revdiff::apply_key(cfg, "threads", threads_text);
        }
        if (!c1_text.empty()) {
            revdiff::apply_key(cfg, "spin.c1", c1_text);
        }
        if (!c2_text.empty()) {
            revdiff::apply_key(cfg, "spin.c2", c2_text);
        }
        if (!z_text.empty()) {
            revdiff::apply_key(cfg, "eventcalc.z", z_text);
        }
        revdiff::validate(cfg);
    } catch (const revdiff::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }

    revdiff::RunReport report;
    try {
        report = revdiff::run_experiment(command, cfg);
    } catch (const revdiff::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: the '" << command << "' run could not be completed: " << e.what()
                  << "\n";
        return 2;
    }

    const std::string report_path =
        (std::filesystem::path(cfg.out_dir) / "report.json").string();
    revdiff::write_report_json(report, cfg, report_path);
    revdiff::print_report(report, std::cout);
    std::cout << "report: " << report_path << "\n";

    if (const revdiff::Assertion* failed = report.first_failure(); failed != nullptr) {
        std::size_t n_failed = 0;
        for (const revdiff::Assertion& a : report.assertions) {
            n_failed += a.pass ? 0 : 1;
        }
        std::cerr << "FAILED: " << failed->name << " = " << failed->value << " (bound "
                  << failed->bound << "); " << n_failed << " of " << report.assertions.size()
                  << " assertions failed\n";
        return 1;
    }
    std::cout << "all " << report.assertions.size() << " assertions passed\n";
    return 0;
}
