#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace sdal {

// CLI entry points, separated from argument parsing so they can be driven
// directly by tests. Exit codes: 0 ok, 1 compute failure, 2 config error.

int cmd_learn(const std::filesystem::path& config_path, std::ostream& log);

int cmd_rom_build(const std::filesystem::path& config_path, std::ostream& log);

struct RomQueryArgs {
    std::filesystem::path artifact;
    std::vector<double> mu;
    /// Query times; empty means the artifact's own time grid.
    std::vector<double> times;
    std::filesystem::path output_dir;
    /// Optional reference snapshot (shared format) for an error report.
    std::optional<std::filesystem::path> reference;
    /// Optional learn config whose FOM is solved once at mu for timing (and
    /// as reference when none was given explicitly).
    std::optional<std::filesystem::path> fom_config;
    bool allow_extrapolation = false;
    /// "csv" or "binary" solution output.
    std::string format = "csv";
};

int cmd_rom_query(const RomQueryArgs& args, std::ostream& log);

struct FomRunArgs {
    double nu = 0.1;
    int nx = 256;
    double x_lo = 0.0;
    double x_hi = 1.0;
    double final_time = 1.0;
    int nt = 100;
    std::string ic = "sine";
    std::filesystem::path output;
};

int cmd_fom_burgers(const FomRunArgs& args, std::ostream& log);

int cmd_trace_export(const std::filesystem::path& trace_csv,
                     const std::filesystem::path& output_dir, std::ostream& log);

} // namespace sdal
