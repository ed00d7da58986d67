#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "polyflow/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Evolve polygons with fixed edge normals under curvature and advection laws"};
    app.require_subcommand(1);

    polyflow::cli::Options opts;
    std::string out_dir;
    app.add_option("--out-dir", out_dir, "Directory for output files (overrides output.dir)");
    app.add_flag("--quiet", opts.quiet, "Print only the essential result lines");
    app.add_option("--seed", opts.seed, "Seed for Lipschitz probe sampling");

    std::string config;
    auto* run = app.add_subcommand("run", "Integrate a flow and write the trajectory, summary and SVG snapshots");
    run->add_option("config", config, "Run configuration (JSON)")->required();
    auto* converge = app.add_subcommand("converge", "Measure the experimental order of convergence");
    converge->add_option("config", config, "Run configuration with a 'converge' section")->required();
    auto* info = app.add_subcommand("info", "Print class coefficients and the constant area speed");
    info->add_option("config", config, "Run configuration (JSON)")->required();

    for (auto* sub : {run, converge, info}) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : polyflow::cli::kExitConfig;
    }
    if (!out_dir.empty()) opts.out_dir = out_dir;

    if (*run) return polyflow::cli::cmd_run(config, opts, std::cout, std::cerr);
    if (*converge) return polyflow::cli::cmd_converge(config, opts, std::cout, std::cerr);
    return polyflow::cli::cmd_info(config, opts, std::cout, std::cerr);
}
