#include "sdal/rom_pod_ksnn.hpp"

#include <string>

#include "sdal/errors.hpp"

namespace sdal {

PodKsnnOffline pod_ksnn_offline_build(const std::vector<ParameterPoint>& training,
                                      const std::vector<SnapshotMatrix>& snapshots,
                                      RbfKernelSpec mu_kernel, RbfKernelSpec time_kernel,
                                      double eta_hat) {
    if (training.size() < 2) {
        throw InsufficientDataError("POD-KSNN offline build needs at least 2 training parameters");
    }
    if (snapshots.size() != training.size()) {
        throw IngestionError("snapshot count does not match training parameter count");
    }
    if (!(eta_hat > 0.0 && eta_hat < 1.0)) {
        throw RangeError("online energy criterion must lie in (0,1)");
    }

    const Eigen::Index n = snapshots[0].values.rows();
    const Eigen::Index n_time = snapshots[0].values.cols();
    for (const auto& snap : snapshots) {
        snap.validate();
        if (snap.values.rows() != n || snap.values.cols() != n_time ||
            snap.time_grid != snapshots[0].time_grid) {
            throw IngestionError("snapshots disagree on spatial dimension or time grid");
        }
    }

    // Row i = column-stacked U(mu_i).
    Eigen::MatrixXd targets(training.size(), n * n_time);
    for (std::size_t i = 0; i < snapshots.size(); ++i) {
        targets.row(i) =
            Eigen::Map<const Eigen::VectorXd>(snapshots[i].values.data(), n * n_time);
    }

    PodKsnnOffline offline;
    offline.mu_net = RbfNetwork::fit_interpolation(training, targets, mu_kernel);
    offline.time_kernel = time_kernel;
    offline.time_grid = snapshots[0].time_grid;
    offline.spatial_dim = n;
    offline.energy_criterion_online = eta_hat;
    return offline;
}

namespace {

void check_time(const PodKsnnOffline& offline, double t, const PodKsnnQueryOptions& options) {
    const double t_final = offline.time_grid[offline.time_grid.size() - 1];
    if (!options.allow_extrapolation && (t < offline.time_grid[0] || t > t_final)) {
        throw RangeError("query time " + std::to_string(t) + " lies outside [" +
                         std::to_string(offline.time_grid[0]) + ", " + std::to_string(t_final) +
                         "]");
    }
}

} // namespace

std::pair<Eigen::VectorXd, PodKsnnOnlineResult>
pod_ksnn_online_query(const PodKsnnOffline& offline, const ParameterPoint& mu, double t,
                      PodKsnnQueryOptions options) {
    check_time(offline, t, options);

    const Eigen::Index n = offline.spatial_dim;
    const Eigen::Index n_time = offline.time_grid.size();

    // Interpolated snapshot matrix, assembled one time column per block so
    // the extra working memory stays at one column.
    SnapshotMatrix interpolated;
    interpolated.values.resize(n, n_time);
    interpolated.parameter = mu;
    interpolated.time_grid = offline.time_grid;
    for (Eigen::Index j = 0; j < n_time; ++j) {
        offline.mu_net.evaluate_block(mu, j * n, n, interpolated.values.col(j).data());
    }
    if (interpolated.values.norm() == 0.0) {
        throw DegenerateInputError("interpolated snapshot matrix is identically zero");
    }

    PodSubspace basis = compute_pod(interpolated, offline.energy_criterion_online);
    Eigen::MatrixXd reduced = pod_project(basis, interpolated);

    // Time interpolant over the reduced coordinates (one point per step).
    std::vector<Eigen::VectorXd> time_points;
    time_points.reserve(n_time);
    for (Eigen::Index j = 0; j < n_time; ++j) {
        time_points.push_back(Eigen::VectorXd::Constant(1, offline.time_grid[j]));
    }
    RbfNetwork time_net =
        RbfNetwork::fit_interpolation(time_points, reduced.transpose(), offline.time_kernel);

    PodKsnnOnlineResult online{std::move(basis), std::move(reduced), std::move(time_net)};

    Eigen::VectorXd solution = pod_ksnn_evaluate(offline, online, t, options);
    return {std::move(solution), std::move(online)};
}

Eigen::VectorXd pod_ksnn_evaluate(const PodKsnnOffline& offline,
                                  const PodKsnnOnlineResult& online, double t,
                                  PodKsnnQueryOptions options) {
    check_time(offline, t, options);
    const Eigen::VectorXd reduced = online.time_net.evaluate(Eigen::VectorXd::Constant(1, t));
    return online.basis.basis.columns() * reduced;
}

} // namespace sdal
