#include "vide/commands.hpp"
#include "vide/errors.hpp"
#include "vide/scenario.hpp"

#include <CLI11.hpp>
#include <fmt/core.h>

#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

struct Options {
    std::string config;
    std::optional<std::string> out;
    std::optional<double> rel_tol;
    std::optional<double> t_end;
    unsigned threads = 1;
    bool seedless = false;  // every run is deterministic; accepted for scripts that pass it
    std::vector<std::string> grid;
    bool emit_configs = false;
};

void add_common(CLI::App* sub, Options& o) {
    sub->add_option("--config", o.config, "scenario file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", o.out, "output directory");
    sub->add_option("--rel-tol", o.rel_tol, "solver relative tolerance")->check(CLI::PositiveNumber);
    sub->add_option("--t-end", o.t_end, "integration horizon")->check(CLI::PositiveNumber);
    sub->add_option("--threads", o.threads, "sweep worker threads")->check(CLI::Range(1u, 256u));
    sub->add_flag("--seedless", o.seedless, "no-op: runs use no random numbers");
}

vide::Scenario load(const Options& o) {
    vide::Scenario s = vide::load_scenario(o.config);
    if (o.rel_tol) s.solver.rel_tol = *o.rel_tol;
    if (o.t_end) s.solver.t_end = *o.t_end;
    return s;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Volterra integro-differential blow-up and growth-rate toolkit"};
    app.require_subcommand(1);
    Options o;
    CLI::App* classify = app.add_subcommand("classify", "Osgood classification of the nonlinearity");
    CLI::App* solve = app.add_subcommand("solve", "integrate and write trajectory CSV + plot script");
    CLI::App* rates = app.add_subcommand("rates", "integrate and run the rate diagnostics");
    CLI::App* sweep = app.add_subcommand("sweep", "run a parameter grid");
    for (CLI::App* sub : {classify, solve, rates, sweep}) add_common(sub, o);
    sweep->add_option("--grid", o.grid, "extra axis key=v1,v2,.. (repeatable)");
    sweep->add_flag("--emit-configs", o.emit_configs, "write one scenario file per cell");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : vide::kExitConfig;
    }

    try {
        const vide::Scenario s = load(o);
        if (classify->parsed()) return vide::cmd_classify(s, std::cout);
        if (solve->parsed()) return vide::cmd_solve(s, o.out.value_or("."), std::cout);
        if (rates->parsed()) {
            std::optional<std::filesystem::path> out_dir;
            if (o.out) out_dir = *o.out;
            return vide::cmd_rates(s, out_dir, std::cout);
        }
        vide::SweepOptions so;
        so.out_dir = o.out.value_or(".");
        so.threads = o.threads;
        so.emit_configs = o.emit_configs;
        for (const std::string& g : o.grid) so.extra_grid.push_back(vide::parse_grid_axis(g));
        return vide::cmd_sweep(s, so, std::cout);
    } catch (const vide::ConfigError& e) {
        fmt::print(stderr, "config error: {}\n", e.what());
        return vide::kExitConfig;
    } catch (const vide::UndecidedError& e) {
        fmt::print(stderr, "undecided: {}\n", e.what());
        return vide::kExitUndecided;
    } catch (const std::exception& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return vide::kExitAborted;
    }
}
