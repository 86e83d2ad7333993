#pragma once

#include <filesystem>
#include <variant>

#include "sdal/rom_pod_ksnn.hpp"
#include "sdal/rom_pod_nn.hpp"

namespace sdal {

/// POD-NN surrogate bundle: global basis plus the reduced-coefficient
/// regressor and the grid metadata needed to answer queries.
struct PodNnModel {
    GlobalBasis global;
    ReducedRegressor regressor;
    Eigen::VectorXd time_grid;
    Eigen::Index param_dim = 0;
};

/// On-disk ROM surrogate, either kind behind one file format.
struct RomArtifact {
    std::variant<PodKsnnOffline, PodNnModel> model;

    bool is_ksnn() const { return std::holds_alternative<PodKsnnOffline>(model); }
    const PodKsnnOffline& ksnn() const { return std::get<PodKsnnOffline>(model); }
    const PodNnModel& pod_nn() const { return std::get<PodNnModel>(model); }

    Eigen::Index param_dim() const;
    const Eigen::VectorXd& time_grid() const;
};

/// Writes atomically: a temp file in the same directory is renamed over
/// the target once fully written.
void save_rom_artifact(const std::filesystem::path& path, const RomArtifact& artifact);
RomArtifact load_rom_artifact(const std::filesystem::path& path);

} // namespace sdal
