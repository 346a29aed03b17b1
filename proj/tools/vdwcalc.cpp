#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "vdw/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"vdwcalc: two-atom van der Waals potentials, parameter sweeps and oracle comparisons"};
    app.require_subcommand(1);
    app.fallthrough();

    vdw::cli::Invocation inv;
    double tolerance = 0.0;
    std::string out;
    app.add_option("--tolerance", tolerance, "relative tolerance for compare (overrides the config)")
        ->check(CLI::PositiveNumber);
    app.add_option("--threads", inv.threads, "worker threads for sweep points")->check(CLI::PositiveNumber);
    app.add_option("--out", out, "output CSV path; a .json sidecar is written next to it");

    auto* run = app.add_subcommand("run", "evaluate the configured quantity over the sweep");
    run->add_option("config", inv.config_path, "JSON configuration")->required();
    auto* cmp = app.add_subcommand("compare", "compare the two configured quantities over the sweep");
    cmp->add_option("config", inv.config_path, "JSON configuration")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : vdw::cli::exit_config;
    }
    inv.command = run->parsed() ? "run" : "compare";
    if (app.count("--tolerance")) inv.tolerance = tolerance;
    if (app.count("--out")) inv.out = out;
    return vdw::cli::execute(inv, std::cout, std::cerr);
}
