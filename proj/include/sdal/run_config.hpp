#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sdal/active_learning.hpp"
#include "sdal/burgers.hpp"
#include "sdal/param_space.hpp"
#include "sdal/rom_pod_nn.hpp"

namespace sdal {

/// Line-oriented `key = value` file (# starts a comment). Typed accessors
/// throw ConfigError naming the key and line; unknown keys are rejected by
/// require_all_consumed().
class KeyValueFile {
public:
    static KeyValueFile parse(const std::filesystem::path& path);

    bool has(const std::string& key) const;
    std::string get_string(const std::string& key);
    std::string get_string_or(const std::string& key, const std::string& fallback);
    double get_double(const std::string& key);
    double get_double_or(const std::string& key, double fallback);
    int get_int(const std::string& key);
    int get_int_or(const std::string& key, int fallback);
    bool get_bool_or(const std::string& key, bool fallback);

    /// Throws ConfigError listing any key never read by the schema.
    void require_all_consumed() const;

    const std::filesystem::path& path() const { return path_; }
    std::size_t line_of(const std::string& key) const;

private:
    struct Entry {
        std::string value;
        std::size_t line = 0;
        mutable bool consumed = false;
    };
    std::map<std::string, Entry> entries_;
    std::filesystem::path path_;

    const Entry& lookup(const std::string& key);
};

struct LearnRunConfig {
    ActiveLearnConfig learn;
    StoreOptions store;

    enum class FomKind { Burgers, Archive };
    FomKind fom = FomKind::Burgers;
    BurgersConfig burgers;
    bool log10_param = false;
    std::filesystem::path archive_dir;

    std::vector<ParameterPoint> training;
    std::vector<ParameterPoint> candidates;

    std::uint64_t seed = 0;
    std::filesystem::path output_dir;
};

/// Parses and schema-validates a learn config. The environment variable
/// SDAL_OUTPUT_DIR, when set, overrides output_dir.
LearnRunConfig load_learn_config(const std::filesystem::path& path);

struct RomBuildConfig {
    enum class Kind { PodKsnn, PodNn };
    Kind kind = Kind::PodKsnn;

    std::filesystem::path learn_dir;
    std::filesystem::path artifact;

    RbfKernelSpec kernel{RbfKernel::Multiquadric, 1e-3};
    RbfKernelSpec time_kernel{RbfKernel::Multiquadric, 1e-3};
    double eta_hat = 1e-6; // POD-KSNN online criterion

    double eta = 1e-6;        // POD-NN per-parameter criterion
    double eta_global = 1e-3; // POD-NN global criterion
    RegressorKind regressor = RegressorKind::RbfNetwork;
    RegressorHyperparams regressor_params;
};

RomBuildConfig load_rom_build_config(const std::filesystem::path& path);

/// Shared helper: parse a kernel name ("gaussian", "multiquadric",
/// "cubic-spline").
RbfKernel parse_kernel_name(const std::string& name);

} // namespace sdal
