#include <CLI11.hpp>
#include <iostream>
#include <string>
#include <vector>

#include "sdal/cli_commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Subspace-distance-enabled active learning for non-intrusive "
                 "parametric reduced-order models"};
    app.require_subcommand(1);

    // fom burgers
    auto* fom = app.add_subcommand("fom", "Run the bundled full-order model");
    fom->require_subcommand(1);
    sdal::FomRunArgs fom_args;
    auto* burgers = fom->add_subcommand("burgers", "1-D viscous Burgers solver");
    burgers->add_option("--nu", fom_args.nu, "Viscosity (> 0)")->required();
    burgers->add_option("--nx", fom_args.nx, "Spatial grid points");
    burgers->add_option("--x-lo", fom_args.x_lo, "Domain lower bound");
    burgers->add_option("--x-hi", fom_args.x_hi, "Domain upper bound");
    burgers->add_option("--T", fom_args.final_time, "Final time");
    burgers->add_option("--nt", fom_args.nt, "Output time steps");
    burgers->add_option("--ic", fom_args.ic, "Initial condition: sine or constant");
    burgers->add_option("--out", fom_args.output, "Output snapshot file (.csv or .sdal)")
        ->required();

    // learn
    auto* learn = app.add_subcommand("learn", "Run the active-learning loop from a config");
    std::string learn_config;
    learn->add_option("--config", learn_config, "Learn config file")->required();

    // rom build / rom query
    auto* rom = app.add_subcommand("rom", "Build or query a reduced-order model");
    rom->require_subcommand(1);
    auto* rom_build = rom->add_subcommand("build", "Build a ROM artifact from a learn output");
    std::string rom_build_config;
    rom_build->add_option("--config", rom_build_config, "ROM build config file")->required();

    auto* rom_query = rom->add_subcommand("query", "Query a ROM artifact");
    sdal::RomQueryArgs query_args;
    std::string query_artifact, query_out;
    std::string query_reference, query_fom_config;
    rom_query->add_option("--artifact", query_artifact, "ROM artifact file")->required();
    rom_query->add_option("--mu", query_args.mu, "Parameter coordinates")->required();
    rom_query->add_option("--t", query_args.times,
                          "Query times (default: the artifact's time grid)");
    rom_query->add_option("--out", query_out, "Output directory")->required();
    rom_query->add_option("--reference", query_reference,
                          "Reference snapshot file for an error report");
    rom_query->add_option("--fom-config", query_fom_config,
                          "Learn config whose FOM is timed at mu for the speedup report");
    rom_query->add_flag("--allow-extrapolation", query_args.allow_extrapolation,
                        "Allow query times outside the training window");
    rom_query->add_option("--format", query_args.format, "Solution format: csv or binary");

    // trace export
    auto* trace = app.add_subcommand("trace", "Trace utilities");
    trace->require_subcommand(1);
    auto* trace_export = trace->add_subcommand("export", "Emit plot-ready CSVs from a trace");
    std::string trace_file, trace_out;
    trace_export->add_option("--trace", trace_file, "Trace CSV from a learn run")->required();
    trace_export->add_option("--out", trace_out, "Output directory")->required();

    CLI11_PARSE(app, argc, argv);

    if (burgers->parsed()) {
        return sdal::cmd_fom_burgers(fom_args, std::cerr);
    }
    if (learn->parsed()) {
        return sdal::cmd_learn(learn_config, std::cerr);
    }
    if (rom_build->parsed()) {
        return sdal::cmd_rom_build(rom_build_config, std::cerr);
    }
    if (rom_query->parsed()) {
        query_args.artifact = query_artifact;
        query_args.output_dir = query_out;
        if (!query_reference.empty()) query_args.reference = query_reference;
        if (!query_fom_config.empty()) query_args.fom_config = query_fom_config;
        return sdal::cmd_rom_query(query_args, std::cerr);
    }
    if (trace_export->parsed()) {
        return sdal::cmd_trace_export(trace_file, trace_out, std::cerr);
    }
    return 2;
}
